#pragma once

/**
 * @file dynamics.hpp
 * @brief Feedback realizations u(z, t) for the plant dz/dt = u that make
 *        V = 0.5 |S|^2 decay at the rate sigma(V, t) demanded by a DecayLaw.
 *
 *  HGD  u = -sigma / |grad V|^2 * grad V        dV/dt = -sigma   (needs grad V != 0)
 *  ND   u = -sigma / (2V) * (grad S)^{-1} S     dV/dt = -sigma   (needs grad S invertible)
 *  GD   u = -sigma / (2 m V) * S                dV/dt <= -sigma  (needs sym(grad S) >= m I)
 */

#include <cmath>
#include <string>
#include <string_view>

#include <Eigen/LU>

#include "olfkit/error.hpp"
#include "olfkit/law.hpp"
#include "olfkit/model.hpp"

namespace olfkit {

enum class RealizationKind { HGD, ND, GD };

constexpr std::string_view to_string(RealizationKind kind) {
  switch (kind) {
    case RealizationKind::HGD: return "hgd";
    case RealizationKind::ND: return "nd";
    case RealizationKind::GD: return "gd";
  }
  return "?";
}

struct Realization {
  RealizationKind kind = RealizationKind::HGD;
  double m = 0.0;  // GD only
  double tol_sing = 1e-12;
  double v_floor = 1e-30;

  static Realization hgd() { return {}; }
  static Realization nd() { return {RealizationKind::ND}; }
  static Realization gd(double m) {
    require(m > 0.0, ErrorCode::InvalidArgument, "gd realization requires m > 0");
    return {RealizationKind::GD, m};
  }

  void validate() const {
    require(tol_sing > 0.0 && v_floor > 0.0, ErrorCode::InvalidArgument,
            "realization tolerances must be positive");
    require(kind != RealizationKind::GD || m > 0.0, ErrorCode::InvalidArgument,
            "gd realization requires m > 0");
  }

  /// Whether the realization enforces dV/dt = -sigma exactly (HGD, ND) or only
  /// the inequality (GD).
  [[nodiscard]] bool enforces_equality() const { return kind != RealizationKind::GD; }
};

/// Everything computed on the way to u; the integrator and the decay
/// verifier both need the intermediate quantities.
struct FieldEvaluation {
  Vector u;
  Vector s;
  Vector grad_v;
  double v = 0.0;
  double sigma = 0.0;

  /// dV/dt along u, i.e. grad V^T u.
  [[nodiscard]] double v_dot() const { return grad_v.dot(u); }
};

namespace detail {

inline void require_square(const StationarityModel& model, RealizationKind kind) {
  if (!model.is_square()) {
    throw Error(ErrorCode::UnsupportedRealization,
                std::string(to_string(kind)) + " needs a square stationarity Jacobian; model '" +
                    model.info().name + "' has " + std::to_string(model.residual_dimension()) +
                    " residuals for " + std::to_string(model.dimension()) + " unknowns");
  }
}

inline void require_above_floor(double v, double v_floor) {
  if (v <= v_floor) throw Error(ErrorCode::ConvergedAlready, "V = " + std::to_string(v) + " is below the floor");
}

}  // namespace detail

inline FieldEvaluation evaluate_field(const StationarityModel& model, const DecayLaw& law,
                                      const Realization& realization, const Vector& z, double t) {
  if (realization.kind != RealizationKind::HGD) detail::require_square(model, realization.kind);

  FieldEvaluation f;
  f.s = model.eval_S(z);
  const Matrix jac = model.eval_jacobian(z);
  f.grad_v = jac.transpose() * f.s;
  f.v = 0.5 * f.s.squaredNorm();
  detail::require_above_floor(f.v, realization.v_floor);
  f.sigma = sigma_eval(law, f.v, t);

  switch (realization.kind) {
    case RealizationKind::HGD: {
      const double gnorm2 = f.grad_v.squaredNorm();
      if (std::sqrt(gnorm2) <= realization.tol_sing * (1.0 + f.s.norm())) {
        throw Error(ErrorCode::SingularityEncountered,
                    "|grad V| = " + std::to_string(std::sqrt(gnorm2)) + " vanishes while V = " + std::to_string(f.v) +
                        " at t = " + std::to_string(t));
      }
      f.u = -(f.sigma / gnorm2) * f.grad_v;
      break;
    }
    case RealizationKind::ND: {
      Eigen::PartialPivLU<Matrix> lu(jac);
      // Exactly singular factors can still report a finite rcond; check the pivots too.
      const Vector pivots = lu.matrixLU().diagonal().cwiseAbs();
      if (!(pivots.minCoeff() > 1e-14 * pivots.maxCoeff()) || !(lu.rcond() > 1e-14)) {
        throw Error(ErrorCode::JacobianSingular,
                    "grad S is singular to working precision at t = " + std::to_string(t));
      }
      const Vector direction = lu.solve(f.s);
      f.u = -(f.sigma / (2.0 * f.v)) * direction;
      break;
    }
    case RealizationKind::GD:
      f.u = -(f.sigma / (2.0 * realization.m * f.v)) * f.s;
      break;
  }
  return f;
}

inline Vector hgd_field(const StationarityModel& model, const DecayLaw& law, const Vector& z, double t,
                        const Realization& realization = Realization::hgd()) {
  Realization r = realization;
  r.kind = RealizationKind::HGD;
  return evaluate_field(model, law, r, z, t).u;
}

inline Vector nd_field(const StationarityModel& model, const DecayLaw& law, const Vector& z, double t,
                       const Realization& realization = Realization::nd()) {
  Realization r = realization;
  r.kind = RealizationKind::ND;
  return evaluate_field(model, law, r, z, t).u;
}

inline Vector gd_field(const StationarityModel& model, const DecayLaw& law, const Vector& z, double t, double m) {
  return evaluate_field(model, law, Realization::gd(m), z, t).u;
}

}  // namespace olfkit
