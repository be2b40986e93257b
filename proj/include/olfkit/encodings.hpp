#pragma once

/**
 * @file encodings.hpp
 * @brief Stationarity models for unconstrained, constrained, minimax and
 *        generalized-Nash problems.
 *
 * Inequalities g(x) <= 0 with multipliers lambda enter through the
 * Fischer-Burmeister residual phi_eps(lambda_i, -g_i(x)). With the argument
 * order (lambda, -g) the exact function vanishes iff lambda >= 0, g <= 0 and
 * lambda * g = 0, which is the complementarity condition we want. The pair
 * (lambda, g) would not have that zero set: phi(0, -3) = 6.
 */

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/QR>

#include "olfkit/error.hpp"
#include "olfkit/model.hpp"

namespace olfkit {

using VectorFn = std::function<Vector(const Vector&)>;
using MatrixFn = std::function<Matrix(const Vector&)>;
/// (x, w) -> sum_i w_i * Hessian of constraint i at x.
using WeightedHessianFn = std::function<Matrix(const Vector&, const Vector&)>;

// ---------------------------------------------------------------------------
// Fischer-Burmeister

/// phi_eps(a, b) = sqrt(a^2 + b^2 + eps^2) - (a + b). eps = 0 is the exact function.
inline double fb_smooth(double a, double b, double eps) {
  return std::hypot(a, b, eps) - (a + b);
}

struct FbPartials {
  double da;
  double db;
};

/// Partial derivatives of phi_eps. Both lie strictly inside (-2, 0) when eps > 0.
/// At the kink a = b = 0 of the exact function the subgradient with unit
/// direction (1, 1)/sqrt(2) is returned.
inline FbPartials fb_partials(double a, double b, double eps) {
  const double r = std::hypot(a, b, eps);
  if (r == 0.0) {
    const double d = 1.0 / std::sqrt(2.0) - 1.0;
    return {d, d};
  }
  return {a / r - 1.0, b / r - 1.0};
}

// ---------------------------------------------------------------------------
// Problem descriptions

/// A vector-valued constraint map c(x) with its Jacobian. An empty
/// weighted_hessian means the map is affine.
struct ConstraintMap {
  Index dim = 0;
  VectorFn value;
  MatrixFn jacobian;
  WeightedHessianFn weighted_hessian;
  std::optional<Matrix> affine_matrix;
  std::optional<Vector> affine_rhs;

  static ConstraintMap none(Index n) {
    ConstraintMap c;
    c.dim = 0;
    c.value = [](const Vector&) { return Vector(0); };
    c.jacobian = [n](const Vector&) { return Matrix(0, n); };
    return c;
  }

  /// c(x) = M x - rhs.
  static ConstraintMap affine(Matrix m, Vector rhs) {
    require(m.rows() == rhs.size(), ErrorCode::ConstructionError, "affine constraint rows do not match rhs");
    ConstraintMap c;
    c.dim = m.rows();
    c.value = [m, rhs](const Vector& x) -> Vector { return m * x - rhs; };
    c.jacobian = [m](const Vector&) -> Matrix { return m; };
    c.affine_matrix = std::move(m);
    c.affine_rhs = std::move(rhs);
    return c;
  }

  [[nodiscard]] bool is_affine() const { return affine_matrix.has_value(); }

  [[nodiscard]] Matrix hessian_sum(const Vector& x, const Vector& w) const {
    if (!weighted_hessian || dim == 0) return Matrix::Zero(x.size(), x.size());
    return weighted_hessian(x, w);
  }
};

struct UnconstrainedProblem {
  Index n_x = 0;
  VectorFn grad_J;
  MatrixFn hess_J;
  std::optional<double> strong_convexity;
  std::string name = "unconstrained";
};

struct ConstrainedProblem {
  Index n_x = 0;
  VectorFn grad_J;
  MatrixFn hess_J;
  ConstraintMap ineq;
  ConstraintMap eq;
  double eps = 1e-6;
  std::string name = "constrained";
};

/// min_x max_y J(x, y) s.t. A x + B y = b, G(x, y) <= 0. Derivative callbacks
/// take the joint vector w = col(x, y).
struct MinimaxProblem {
  Index n_x = 0;
  Index n_y = 0;
  VectorFn grad_x;
  VectorFn grad_y;
  MatrixFn hess_xx;
  MatrixFn hess_xy;  // d(grad_x J)/dy, n_x by n_y
  MatrixFn hess_yx;  // d(grad_y J)/dx, n_y by n_x
  MatrixFn hess_yy;
  ConstraintMap ineq;  // G over w
  Matrix A;            // q by n_x
  Matrix B;            // q by n_y
  Vector b;
  std::string name = "minimax";
};

/// Shared-constraint game with stacked pseudogradient over all players.
struct GNEProblem {
  std::vector<Index> player_dims;
  VectorFn pseudogradient;
  MatrixFn pseudogradient_jacobian;
  ConstraintMap ineq;
  Matrix A;
  Vector b;
  std::optional<double> strong_monotonicity;
  std::string name = "gne";

  [[nodiscard]] Index n() const {
    Index total = 0;
    for (Index d : player_dims) total += d;
    return total;
  }
};

// ---------------------------------------------------------------------------
// Models

class UnconstrainedModel final : public StationarityModel {
 public:
  explicit UnconstrainedModel(UnconstrainedProblem p)
      : StationarityModel(BlockLayout()
                              .add_state("x", BlockRole::PrimalX, p.n_x)
                              .add_residual("gradient", ResidualKind::Stationarity, p.n_x),
                          ModelInfo{p.name, p.strong_convexity, std::nullopt}),
        p_(std::move(p)) {}

  [[nodiscard]] Vector eval_S(const Vector& z) const override {
    check_state(z);
    return p_.grad_J(z);
  }
  [[nodiscard]] Matrix eval_jacobian(const Vector& z) const override {
    check_state(z);
    return p_.hess_J(z);
  }

 private:
  UnconstrainedProblem p_;
};

/// Primal residual map shared by the constrained, minimax and GNE encodings:
/// the gradient-like field F over the primal block, plus inequality and
/// equality constraint maps on it.
struct KktSystem {
  Index n = 0;
  VectorFn field;
  MatrixFn field_jacobian;
  ConstraintMap ineq;
  ConstraintMap eq;
  double eps = 1e-6;
};

namespace detail {

inline void check_shape(const Matrix& m, Index rows, Index cols, const std::string& what) {
  require(m.rows() == rows && m.cols() == cols, ErrorCode::ConstructionError,
          what + " has shape " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ", expected " +
              std::to_string(rows) + "x" + std::to_string(cols));
}

inline void check_size(const Vector& v, Index n, const std::string& what) {
  require(v.size() == n, ErrorCode::ConstructionError,
          what + " has length " + std::to_string(v.size()) + ", expected " + std::to_string(n));
}

inline void check_constraint_map(const ConstraintMap& c, Index n, const std::string& what) {
  require(c.dim >= 0 && c.value && c.jacobian, ErrorCode::ConstructionError, what + " map is incomplete");
  const Vector x0 = Vector::Zero(n);
  check_size(c.value(x0), c.dim, what + " value");
  check_shape(c.jacobian(x0), c.dim, n, what + " jacobian");
}

inline void require_full_row_rank(const Matrix& a, const std::string& what) {
  if (a.rows() == 0) return;
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  require(qr.rank() == a.rows(), ErrorCode::ConstructionError, what + " must have full row rank");
}

inline void validate(const KktSystem& k) {
  require(k.n >= 1, ErrorCode::ConstructionError, "primal dimension must be positive");
  require(k.eps > 0.0, ErrorCode::ConstructionError, "smoothing eps must be positive");
  require(bool(k.field) && bool(k.field_jacobian), ErrorCode::ConstructionError, "missing primal field");
  check_constraint_map(k.ineq, k.n, "inequality");
  check_constraint_map(k.eq, k.n, "equality");
  if (k.eq.is_affine()) require_full_row_rank(*k.eq.affine_matrix, "equality matrix");
}

}  // namespace detail

/**
 * @brief Smoothed-FB KKT residual over z = col(x, lambda, mu):
 *
 *   S = col( F(x) + grad g^T lambda + grad h^T mu,
 *            phi_eps(lambda_i, -g_i(x)),
 *            h(x) )
 */
class KktModel final : public StationarityModel {
 public:
  KktModel(KktSystem k, BlockLayout layout, ModelInfo info)
      : StationarityModel(std::move(layout), std::move(info)), k_(std::move(k)) {
    detail::validate(k_);
    require(dimension() == k_.n + k_.ineq.dim + k_.eq.dim && is_square(), ErrorCode::ConstructionError,
            "layout does not match the KKT system dimensions");
  }

  [[nodiscard]] Index primal_dim() const { return k_.n; }
  [[nodiscard]] Index ineq_dim() const { return k_.ineq.dim; }
  [[nodiscard]] Index eq_dim() const { return k_.eq.dim; }
  [[nodiscard]] double eps() const { return k_.eps; }

  [[nodiscard]] Vector eval_S(const Vector& z) const override {
    check_state(z);
    const auto [x, lam, mu] = split(z);
    const Index n = k_.n, m = k_.ineq.dim, q = k_.eq.dim;
    const Vector f = k_.field(x);
    detail::check_size(f, n, "primal field");
    const Vector g = k_.ineq.value(x);
    const Matrix jg = k_.ineq.jacobian(x);

    Vector s(n + m + q);
    s.head(n) = f + jg.transpose() * lam;
    if (q > 0) s.head(n) += k_.eq.jacobian(x).transpose() * mu;
    for (Index i = 0; i < m; ++i) s[n + i] = fb_smooth(lam[i], -g[i], k_.eps);
    if (q > 0) s.tail(q) = k_.eq.value(x);
    return s;
  }

  [[nodiscard]] Matrix eval_jacobian(const Vector& z) const override {
    check_state(z);
    const auto [x, lam, mu] = split(z);
    const Index n = k_.n, m = k_.ineq.dim, q = k_.eq.dim;
    const Matrix jf = k_.field_jacobian(x);
    detail::check_shape(jf, n, n, "primal field jacobian");
    const Vector g = k_.ineq.value(x);
    const Matrix jg = k_.ineq.jacobian(x);
    const Matrix jh = k_.eq.jacobian(x);

    Matrix jac = Matrix::Zero(n + m + q, n + m + q);
    jac.topLeftCorner(n, n) = jf + k_.ineq.hessian_sum(x, lam) + k_.eq.hessian_sum(x, mu);
    jac.block(0, n, n, m) = jg.transpose();
    jac.block(0, n + m, n, q) = jh.transpose();
    for (Index i = 0; i < m; ++i) {
      const FbPartials d = fb_partials(lam[i], -g[i], k_.eps);
      jac.block(n + i, 0, 1, n) = -d.db * jg.row(i);
      jac(n + i, n + i) = d.da;
    }
    jac.block(n + m, 0, q, n) = jh;
    return jac;
  }

 private:
  struct Parts {
    Vector x, lam, mu;
  };
  [[nodiscard]] Parts split(const Vector& z) const {
    return {z.head(k_.n), z.segment(k_.n, k_.ineq.dim), z.tail(k_.eq.dim)};
  }

  KktSystem k_;
};

/**
 * @brief Nonsmooth exact KKT residual
 *
 *   S = col( grad_x L, lambda^T g, max(g, 0), max(-lambda, 0), h )
 *
 * S has n + 1 + 2m + q rows for n + m + q unknowns, so only HGD can drive it.
 * Kinks of the max terms use the derivative 0.
 */
class ExactKktModel final : public StationarityModel {
 public:
  explicit ExactKktModel(ConstrainedProblem p)
      : StationarityModel(BlockLayout()
                              .add_state("x", BlockRole::PrimalX, p.n_x)
                              .add_state("lambda", BlockRole::IneqMultiplier, p.ineq.dim)
                              .add_state("mu", BlockRole::EqMultiplier, p.eq.dim)
                              .add_residual("lagrangian_gradient", ResidualKind::Stationarity, p.n_x)
                              .add_residual("complementarity", ResidualKind::Inequality, 1)
                              .add_residual("primal_infeasibility", ResidualKind::Inequality, p.ineq.dim)
                              .add_residual("dual_infeasibility", ResidualKind::Inequality, p.ineq.dim)
                              .add_residual("equality", ResidualKind::Equality, p.eq.dim),
                          ModelInfo{p.name + "/exact", std::nullopt, std::nullopt}),
        p_(std::move(p)) {
    require(p_.n_x >= 1 && p_.grad_J && p_.hess_J, ErrorCode::ConstructionError, "incomplete objective");
    detail::check_constraint_map(p_.ineq, p_.n_x, "inequality");
    detail::check_constraint_map(p_.eq, p_.n_x, "equality");
    if (p_.eq.is_affine()) detail::require_full_row_rank(*p_.eq.affine_matrix, "equality matrix");
  }

  [[nodiscard]] Vector eval_S(const Vector& z) const override {
    check_state(z);
    const Index n = p_.n_x, m = p_.ineq.dim, q = p_.eq.dim;
    const Vector x = z.head(n), lam = z.segment(n, m), mu = z.tail(q);
    const Vector g = p_.ineq.value(x);

    Vector s(n + 1 + 2 * m + q);
    s.head(n) = p_.grad_J(x) + p_.ineq.jacobian(x).transpose() * lam;
    if (q > 0) s.head(n) += p_.eq.jacobian(x).transpose() * mu;
    s[n] = lam.dot(g);
    s.segment(n + 1, m) = g.cwiseMax(0.0);
    s.segment(n + 1 + m, m) = (-lam).cwiseMax(0.0);
    if (q > 0) s.tail(q) = p_.eq.value(x);
    return s;
  }

  [[nodiscard]] Matrix eval_jacobian(const Vector& z) const override {
    check_state(z);
    const Index n = p_.n_x, m = p_.ineq.dim, q = p_.eq.dim;
    const Vector x = z.head(n), lam = z.segment(n, m), mu = z.tail(q);
    const Vector g = p_.ineq.value(x);
    const Matrix jg = p_.ineq.jacobian(x);
    const Matrix jh = p_.eq.jacobian(x);

    Matrix jac = Matrix::Zero(residual_dimension(), dimension());
    jac.topLeftCorner(n, n) = p_.hess_J(x) + p_.ineq.hessian_sum(x, lam) + p_.eq.hessian_sum(x, mu);
    jac.block(0, n, n, m) = jg.transpose();
    jac.block(0, n + m, n, q) = jh.transpose();
    jac.block(n, 0, 1, n) = lam.transpose() * jg;
    jac.block(n, n, 1, m) = g.transpose();
    for (Index i = 0; i < m; ++i) {
      if (g[i] > 0.0) jac.block(n + 1 + i, 0, 1, n) = jg.row(i);
      if (lam[i] < 0.0) jac(n + 1 + m + i, n + i) = -1.0;
    }
    jac.block(n + 1 + 2 * m, 0, q, n) = jh;
    return jac;
  }

 private:
  ConstrainedProblem p_;
};

// ---------------------------------------------------------------------------
// Encoders

inline std::unique_ptr<StationarityModel> encode_unconstrained(UnconstrainedProblem p) {
  require(p.n_x >= 1 && p.grad_J && p.hess_J, ErrorCode::ConstructionError, "incomplete unconstrained problem");
  return std::make_unique<UnconstrainedModel>(std::move(p));
}

inline std::unique_ptr<KktModel> encode_constrained_fb(const ConstrainedProblem& p) {
  require(p.grad_J && p.hess_J, ErrorCode::ConstructionError, "incomplete objective");
  KktSystem k{p.n_x, p.grad_J, p.hess_J, p.ineq, p.eq, p.eps};
  BlockLayout layout;
  layout.add_state("x", BlockRole::PrimalX, p.n_x)
      .add_state("lambda", BlockRole::IneqMultiplier, p.ineq.dim)
      .add_state("mu", BlockRole::EqMultiplier, p.eq.dim)
      .add_residual("lagrangian_gradient", ResidualKind::Stationarity, p.n_x)
      .add_residual("fb", ResidualKind::Inequality, p.ineq.dim)
      .add_residual("equality", ResidualKind::Equality, p.eq.dim);
  return std::make_unique<KktModel>(std::move(k), std::move(layout), ModelInfo{p.name, std::nullopt, p.eps});
}

inline std::unique_ptr<ExactKktModel> encode_constrained_exact(ConstrainedProblem p) {
  return std::make_unique<ExactKktModel>(std::move(p));
}

/// The y-block carries -grad_y J so the saddle point is a joint zero; apart
/// from that sign the system is a joint KKT system over w = col(x, y).
inline std::unique_ptr<KktModel> encode_minimax(const MinimaxProblem& p, double eps) {
  const Index nx = p.n_x, ny = p.n_y, n = nx + ny;
  require(nx >= 1 && ny >= 1, ErrorCode::ConstructionError, "minimax needs both players");
  require(p.grad_x && p.grad_y && p.hess_xx && p.hess_xy && p.hess_yx && p.hess_yy, ErrorCode::ConstructionError,
          "incomplete minimax derivatives");
  const Index q = p.A.rows();
  detail::check_shape(p.A, q, nx, "A");
  detail::check_shape(p.B, q, ny, "B");
  detail::check_size(p.b, q, "b");

  Matrix ab(q, n);
  ab << p.A, p.B;
  KktSystem k;
  k.n = n;
  k.field = [p, nx, ny](const Vector& w) -> Vector {
    Vector f(nx + ny);
    f << p.grad_x(w), -p.grad_y(w);
    return f;
  };
  k.field_jacobian = [p, nx, ny](const Vector& w) -> Matrix {
    Matrix jf(nx + ny, nx + ny);
    jf << p.hess_xx(w), p.hess_xy(w), -p.hess_yx(w), -p.hess_yy(w);
    return jf;
  };
  k.ineq = p.ineq;
  k.eq = q > 0 ? ConstraintMap::affine(ab, p.b) : ConstraintMap::none(n);
  k.eps = eps;

  BlockLayout layout;
  layout.add_state("x", BlockRole::PrimalX, nx)
      .add_state("y", BlockRole::PrimalY, ny)
      .add_state("lambda", BlockRole::IneqMultiplier, p.ineq.dim)
      .add_state("mu", BlockRole::EqMultiplier, q)
      .add_residual("x_stationarity", ResidualKind::Stationarity, nx)
      .add_residual("y_stationarity", ResidualKind::Stationarity, ny)
      .add_residual("fb", ResidualKind::Inequality, p.ineq.dim)
      .add_residual("equality", ResidualKind::Equality, q);
  return std::make_unique<KktModel>(std::move(k), std::move(layout), ModelInfo{p.name, std::nullopt, eps});
}

inline std::unique_ptr<KktModel> encode_gne(const GNEProblem& p, double eps) {
  const Index n = p.n();
  require(!p.player_dims.empty(), ErrorCode::ConstructionError, "game needs at least one player");
  require(p.pseudogradient && p.pseudogradient_jacobian, ErrorCode::ConstructionError, "missing pseudogradient");
  const Index q = p.A.rows();
  detail::check_shape(p.A, q, n, "A");
  detail::check_size(p.b, q, "b");

  KktSystem k{n, p.pseudogradient, p.pseudogradient_jacobian, p.ineq,
              q > 0 ? ConstraintMap::affine(p.A, p.b) : ConstraintMap::none(n), eps};
  BlockLayout layout;
  for (std::size_t i = 0; i < p.player_dims.size(); ++i)
    layout.add_state("x" + std::to_string(i + 1), BlockRole::PrimalX, p.player_dims[i]);
  layout.add_state("lambda", BlockRole::IneqMultiplier, p.ineq.dim)
      .add_state("mu", BlockRole::EqMultiplier, q)
      .add_residual("stationarity", ResidualKind::Stationarity, n)
      .add_residual("r_ineq", ResidualKind::Inequality, p.ineq.dim)
      .add_residual("r_eq", ResidualKind::Equality, q);
  return std::make_unique<KktModel>(std::move(k), std::move(layout),
                                    ModelInfo{p.name, p.strong_monotonicity, eps});
}

}  // namespace olfkit
