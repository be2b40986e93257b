#pragma once

/**
 * @file model.hpp
 * @brief Stationarity-model contract and the quadratic optimization Lyapunov function.
 *
 * A stationarity model maps a flat state z to a residual S(z) whose zeros are
 * exactly the first-order optimal points of some problem. The Lyapunov value
 * is V(z) = 0.5 |S(z)|^2 with gradient grad S(z)^T S(z).
 */

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "olfkit/error.hpp"

namespace olfkit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

enum class BlockRole { PrimalX, PrimalY, IneqMultiplier, EqMultiplier };

/// Residual rows are grouped by what they certify; reports aggregate by kind.
enum class ResidualKind { Stationarity, Inequality, Equality };

struct StateBlock {
  std::string name;
  BlockRole role;
  Index offset;
  Index size;
};

struct ResidualBlock {
  std::string name;
  ResidualKind kind;
  Index offset;
  Index size;
};

/// Contiguous named blocks of the state vector z and of the residual S(z).
class BlockLayout {
 public:
  BlockLayout& add_state(std::string name, BlockRole role, Index size) {
    require(size >= 0, ErrorCode::ConstructionError, "negative block size for " + name);
    state_.push_back({std::move(name), role, state_dim_, size});
    state_dim_ += size;
    return *this;
  }

  BlockLayout& add_residual(std::string name, ResidualKind kind, Index size) {
    require(size >= 0, ErrorCode::ConstructionError, "negative block size for " + name);
    residual_.push_back({std::move(name), kind, residual_dim_, size});
    residual_dim_ += size;
    return *this;
  }

  [[nodiscard]] Index state_dim() const { return state_dim_; }
  [[nodiscard]] Index residual_dim() const { return residual_dim_; }
  [[nodiscard]] const std::vector<StateBlock>& state_blocks() const { return state_; }
  [[nodiscard]] const std::vector<ResidualBlock>& residual_blocks() const { return residual_; }

  [[nodiscard]] const StateBlock* find_state(BlockRole role) const {
    for (const auto& b : state_)
      if (b.role == role) return &b;
    return nullptr;
  }

  /// Total size of all state blocks with the given role.
  [[nodiscard]] Index state_size(BlockRole role) const {
    Index n = 0;
    for (const auto& b : state_)
      if (b.role == role) n += b.size;
    return n;
  }

 private:
  std::vector<StateBlock> state_;
  std::vector<ResidualBlock> residual_;
  Index state_dim_ = 0;
  Index residual_dim_ = 0;
};

struct ModelInfo {
  std::string name;
  std::optional<double> strong_monotonicity;
  std::optional<double> smoothing;
};

/**
 * @brief Evaluation contract for one problem encoding.
 *
 * Implementations are immutable after construction; eval_S and eval_jacobian
 * must be deterministic functions of z. The Jacobian has shape
 * residual_dimension() x dimension(); most encodings are square.
 */
class StationarityModel {
 public:
  StationarityModel(BlockLayout layout, ModelInfo info) : layout_(std::move(layout)), info_(std::move(info)) {
    require(layout_.state_dim() >= 1, ErrorCode::ConstructionError, "model needs at least one unknown");
    require(layout_.residual_dim() >= 1, ErrorCode::ConstructionError, "model needs at least one residual");
  }
  virtual ~StationarityModel() = default;

  StationarityModel(const StationarityModel&) = delete;
  StationarityModel& operator=(const StationarityModel&) = delete;

  [[nodiscard]] Index dimension() const { return layout_.state_dim(); }
  [[nodiscard]] Index residual_dimension() const { return layout_.residual_dim(); }
  [[nodiscard]] bool is_square() const { return dimension() == residual_dimension(); }
  [[nodiscard]] const BlockLayout& layout() const { return layout_; }
  [[nodiscard]] const ModelInfo& info() const { return info_; }

  [[nodiscard]] virtual Vector eval_S(const Vector& z) const = 0;
  [[nodiscard]] virtual Matrix eval_jacobian(const Vector& z) const = 0;

 protected:
  void check_state(const Vector& z) const {
    require(z.size() == dimension(), ErrorCode::InvalidArgument,
            "state has dimension " + std::to_string(z.size()) + ", model expects " +
                std::to_string(dimension()));
  }

 private:
  BlockLayout layout_;
  ModelInfo info_;
};

/// V(z) = 0.5 |S(z)|^2.
inline double olf_value(const StationarityModel& model, const Vector& z) {
  return 0.5 * model.eval_S(z).squaredNorm();
}

/// grad V(z) = grad S(z)^T S(z).
inline Vector olf_gradient(const StationarityModel& model, const Vector& z) {
  return model.eval_jacobian(z).transpose() * model.eval_S(z);
}

inline double default_fd_step(const Vector& z) {
  return 1e-6 * (1.0 + (z.size() ? z.cwiseAbs().maxCoeff() : 0.0));
}

/// Largest entrywise disagreement between the analytic Jacobian and central
/// differences of S, scaled by 1 + |analytic entry|.
inline double fd_check(const StationarityModel& model, const Vector& z, std::optional<double> step = {}) {
  const double h = step.value_or(default_fd_step(z));
  require(h > 0.0, ErrorCode::InvalidArgument, "fd_check step must be positive");
  const Matrix jac = model.eval_jacobian(z);
  double worst = 0.0;
  Vector zp = z;
  Vector zm = z;
  for (Index j = 0; j < z.size(); ++j) {
    zp[j] = z[j] + h;
    zm[j] = z[j] - h;
    const Vector column = (model.eval_S(zp) - model.eval_S(zm)) / (2.0 * h);
    zp[j] = z[j];
    zm[j] = z[j];
    for (Index i = 0; i < column.size(); ++i) {
      worst = std::max(worst, std::abs(column[i] - jac(i, j)) / (1.0 + std::abs(jac(i, j))));
    }
  }
  return worst;
}

/// Euclidean norm of each named residual block.
inline std::map<std::string, double> block_residuals(const StationarityModel& model, const Vector& z) {
  const Vector s = model.eval_S(z);
  std::map<std::string, double> out;
  for (const auto& b : model.layout().residual_blocks()) out[b.name] = s.segment(b.offset, b.size).norm();
  return out;
}

/// Residual norms aggregated per kind (stationarity / inequality / equality).
struct KindResiduals {
  double stationarity = 0.0;
  double inequality = 0.0;
  double equality = 0.0;
};

inline KindResiduals residuals_by_kind(const BlockLayout& layout, const Vector& s) {
  double sq[3] = {0.0, 0.0, 0.0};
  for (const auto& b : layout.residual_blocks())
    sq[static_cast<int>(b.kind)] += s.segment(b.offset, b.size).squaredNorm();
  return {std::sqrt(sq[0]), std::sqrt(sq[1]), std::sqrt(sq[2])};
}

}  // namespace olfkit
