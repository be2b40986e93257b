#pragma once

/**
 * @file integrate.hpp
 * @brief Simulates dz/dt = u(z, t) with adaptive Dormand-Prince 5(4) stepping,
 *        stops when |S| reaches the stationarity tolerance, and records a
 *        sampled trajectory for later decay-law verification.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/numeric/odeint.hpp>
#include <boost/numeric/odeint/external/eigen/eigen.hpp>

#include "olfkit/dynamics.hpp"
#include "olfkit/error.hpp"
#include "olfkit/law.hpp"
#include "olfkit/model.hpp"

namespace olfkit {

enum class SolveStatus { Converged, SingularStall, HorizonReached, StepFailure, DomainViolation };

constexpr std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::SingularStall: return "SingularStall";
    case SolveStatus::HorizonReached: return "HorizonReached";
    case SolveStatus::StepFailure: return "StepFailure";
    case SolveStatus::DomainViolation: return "DomainViolation";
  }
  return "?";
}

struct SolveConfig {
  DecayLaw law = DecayLaw::exponential(1.0);
  Realization realization = Realization::hgd();
  double tol_stat = 1e-6;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double max_time = 100.0;
  double pt_clip = 1e-3;  // prescribed-time runs stop at T (1 - pt_clip)
  int samples = 400;
  double initial_step = 1e-4;
  long max_steps = 5'000'000;

  void validate() const {
    require(tol_stat > 0.0 && rel_tol > 0.0 && abs_tol > 0.0, ErrorCode::InvalidArgument,
            "tolerances must be positive");
    require(max_time > 0.0, ErrorCode::InvalidArgument, "max time must be positive");
    require(pt_clip > 0.0 && pt_clip < 1.0, ErrorCode::InvalidArgument, "pt clip fraction must lie in (0,1)");
    require(samples >= 3, ErrorCode::InvalidArgument, "need at least 3 samples");
    require(initial_step > 0.0 && max_steps > 0, ErrorCode::InvalidArgument, "invalid step controls");
    realization.validate();
  }

  /// Last time the integrator may reach.
  [[nodiscard]] double end_time() const {
    if (auto horizon = law.horizon()) return std::min(max_time, *horizon * (1.0 - pt_clip));
    return max_time;
  }
};

struct Sample {
  double t = 0.0;
  Vector z;
  double v = 0.0;
  double norm_s = 0.0;
  KindResiduals residuals;
  double norm_u = 0.0;
  double sigma = 0.0;
};

struct Trajectory {
  std::vector<Sample> samples;

  [[nodiscard]] bool empty() const { return samples.empty(); }
  [[nodiscard]] const Sample& back() const { return samples.back(); }
};

struct SolveReport {
  SolveStatus status = SolveStatus::StepFailure;
  double stop_time = 0.0;
  long field_evaluations = 0;
  long accepted_steps = 0;
  double v0 = 0.0;
  double final_norm_s = 0.0;
  Vector final_state;
  std::optional<double> settling_bound;
  bool within_bound = false;
  double decay_violation = 0.0;
  std::string message;
};

struct SolveResult {
  Trajectory trajectory;
  SolveReport report;
};

namespace detail {

inline Sample make_sample(const StationarityModel& model, const SolveConfig& cfg, const Vector& z, double t) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  Sample s;
  s.t = t;
  s.z = z;
  try {
    const Vector res = model.eval_S(z);
    s.v = 0.5 * res.squaredNorm();
    s.norm_s = res.norm();
    s.residuals = residuals_by_kind(model.layout(), res);
  } catch (const Error&) {
    s.v = s.norm_s = nan;
    s.residuals = {nan, nan, nan};
  }
  try {
    const FieldEvaluation f = evaluate_field(model, cfg.law, cfg.realization, z, t);
    s.norm_u = f.u.norm();
    s.sigma = f.sigma;
  } catch (const Error&) {
    s.norm_u = s.sigma = nan;
  }
  return s;
}

inline SolveStatus status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularityEncountered:
    case ErrorCode::JacobianSingular: return SolveStatus::SingularStall;
    case ErrorCode::DomainViolation: return SolveStatus::DomainViolation;
    default: return SolveStatus::StepFailure;
  }
}

}  // namespace detail

struct DecayCheck {
  double max_violation = 0.0;
  std::size_t worst_index = 0;
};

/// Largest decay-law violation over the recorded states, normalized by
/// max(1, sigma), and the sample where it occurs. HGD/ND are checked
/// two-sided (dV/dt = -sigma); GD one-sided (dV/dt <= -sigma). Every quantity
/// is recomputed from the model.
inline DecayCheck check_decay(const StationarityModel& model, const Trajectory& trajectory, const DecayLaw& law,
                              const Realization& realization) {
  require(trajectory.samples.size() >= 3, ErrorCode::InvalidArgument, "decay check needs at least 3 samples");
  DecayCheck out;
  for (std::size_t i = 0; i < trajectory.samples.size(); ++i) {
    const Sample& s = trajectory.samples[i];
    const FieldEvaluation f = evaluate_field(model, law, realization, s.z, s.t);
    const double gap = (f.v_dot() + f.sigma) / std::max(1.0, f.sigma);
    const double violation = realization.enforces_equality() ? std::abs(gap) : std::max(0.0, gap);
    if (violation > out.max_violation) {
      out.max_violation = violation;
      out.worst_index = i;
    }
  }
  return out;
}

inline double verify_decay(const StationarityModel& model, const Trajectory& trajectory, const DecayLaw& law,
                           const Realization& realization) {
  return check_decay(model, trajectory, law, realization).max_violation;
}

/**
 * @brief Integrates the closed loop from z0 until |S| <= tol_stat, the time
 *        limit, or a field failure.
 *
 * The stop time of a converged run is located inside the final step by
 * bisection on the stepper's dense output. Samples are taken from the dense
 * output at each of `samples` log-spaced V levels between V(z0) and
 * tol_stat^2 / 2 and at each of `samples` evenly spaced instants in
 * [0, end time], plus the terminal point.
 */
inline SolveResult solve(const StationarityModel& model, const SolveConfig& cfg, const Vector& z0) {
  namespace ode = boost::numeric::odeint;
  using Stepper = ode::runge_kutta_dopri5<Vector, double, Vector, double, ode::vector_space_algebra>;

  cfg.validate();
  require(z0.size() == model.dimension(), ErrorCode::InvalidArgument,
          "initial state has dimension " + std::to_string(z0.size()) + ", model expects " +
              std::to_string(model.dimension()));

  SolveResult out;
  SolveReport& rep = out.report;
  auto& samples = out.trajectory.samples;
  const double t_end = cfg.end_time();
  const double v_stop = 0.5 * cfg.tol_stat * cfg.tol_stat;

  auto norm_s = [&](const Vector& z) { return model.eval_S(z).norm(); };
  auto push = [&](Sample s) {
    if (!samples.empty() && s.t <= samples.back().t) samples.back() = std::move(s);
    else samples.push_back(std::move(s));
  };
  auto finish = [&](SolveStatus status, double t, const Vector& z, std::string message) {
    rep.status = status;
    rep.stop_time = t;
    rep.final_state = z;
    rep.message = std::move(message);
    push(detail::make_sample(model, cfg, z, t));
    rep.final_norm_s = samples.back().norm_s;
    rep.settling_bound = settling_bound(cfg.law, rep.v0);
    rep.within_bound = status == SolveStatus::Converged && (!rep.settling_bound || t <= *rep.settling_bound);
    if (samples.size() >= 3) {
      try {
        rep.decay_violation = verify_decay(model, out.trajectory, cfg.law, cfg.realization);
      } catch (const Error&) {
        rep.decay_violation = std::numeric_limits<double>::quiet_NaN();
      }
    }
    return out;
  };

  Vector z = z0;
  double t = 0.0;
  try {
    rep.v0 = olf_value(model, z0);
  } catch (const Error& e) {
    rep.status = detail::status_for(e.code());
    rep.message = e.what();
    rep.final_state = z0;
    return out;
  }
  samples.push_back(detail::make_sample(model, cfg, z0, 0.0));
  if (std::sqrt(2.0 * rep.v0) <= cfg.tol_stat) return finish(SolveStatus::Converged, 0.0, z0, "initial state is stationary");

  // Sampling levels.
  const double log_v0 = std::log(rep.v0);
  const double log_step = (log_v0 - std::log(std::min(v_stop, rep.v0))) / (cfg.samples - 1);
  const double time_step = t_end / (cfg.samples - 1);
  int next_level = 1;
  int next_time = 1;

  // Below the floor the field is taken as zero: z is already at the solution.
  auto system = [&](const Vector& x, Vector& dxdt, double time) {
    ++rep.field_evaluations;
    try {
      dxdt = evaluate_field(model, cfg.law, cfg.realization, x, time).u;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ConvergedAlready) throw;
      dxdt = Vector::Zero(x.size());
    }
  };

  auto stepper = ode::make_dense_output(cfg.abs_tol, cfg.rel_tol, Stepper());
  stepper.initialize(z0, 0.0, std::min(cfg.initial_step, t_end));

  try {
    for (;;) {
      if (rep.accepted_steps >= cfg.max_steps) {
        return finish(SolveStatus::StepFailure, t, z, "step budget exhausted");
      }
      if (stepper.current_time() + stepper.current_time_step() > t_end) {
        stepper.initialize(stepper.current_state(), stepper.current_time(), t_end - stepper.current_time());
      }
      const auto [t_old, t_new] = stepper.do_step(system);
      ++rep.accepted_steps;
      t = t_new;
      z = stepper.current_state();

      const bool converged = norm_s(z) <= cfg.tol_stat;
      double t_stop = t_new;
      if (converged) {
        // First crossing of |S| = tol inside [t_old, t_new].
        double lo = t_old, hi = t_new;
        Vector probe(z.size());
        while (hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi)) {
          const double mid = 0.5 * (lo + hi);
          stepper.calc_state(mid, probe);
          if (norm_s(probe) <= cfg.tol_stat) hi = mid;
          else lo = mid;
        }
        t_stop = hi;
        if (hi < t_new) stepper.calc_state(hi, z);
      }

      // Sample instants inside this step: time-grid points and V-level crossings.
      std::vector<double> instants;
      while (next_time < cfg.samples && next_time * time_step <= t_stop) instants.push_back(next_time++ * time_step);
      const double log_v_new = std::log(olf_value(model, z));
      Vector probe(z.size());
      while (next_level < cfg.samples && log_v_new <= log_v0 - next_level * log_step) {
        const double level = log_v0 - next_level++ * log_step;
        double lo = t_old, hi = t_stop;
        for (int it = 0; it < 60 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
          const double mid = 0.5 * (lo + hi);
          stepper.calc_state(mid, probe);
          if (std::log(olf_value(model, probe)) <= level) hi = mid;
          else lo = mid;
        }
        instants.push_back(hi);
      }
      std::sort(instants.begin(), instants.end());
      for (double ti : instants) {
        if (ti >= t_stop) continue;
        stepper.calc_state(ti, probe);
        push(detail::make_sample(model, cfg, probe, ti));
      }

      if (converged) return finish(SolveStatus::Converged, t_stop, z, "stationarity tolerance reached");

      if (t >= t_end - 1e-13 * std::max(1.0, t_end)) {
        return finish(SolveStatus::HorizonReached, t, z, "time limit reached before the stationarity tolerance");
      }
      if (stepper.current_time_step() < 1e-15 * std::max(1.0, t)) {
        // A collapsing step next to a vanishing grad V is the field blowing up.
        const Vector res = model.eval_S(z);
        if (olf_gradient(model, z).norm() <= 1e-6 * (1.0 + res.norm())) {
          return finish(SolveStatus::SingularStall, t, z, "step size collapsed as grad V vanished");
        }
        return finish(SolveStatus::StepFailure, t, z, "step size collapsed");
      }
    }
  } catch (const Error& e) {
    return finish(detail::status_for(e.code()), t, z, e.what());
  } catch (const ode::step_adjustment_error& e) {
    return finish(SolveStatus::StepFailure, t, z, e.what());
  }
}

}  // namespace olfkit
