#pragma once

/**
 * @file law.hpp
 * @brief Convergence-rate templates sigma(V, t) and their settling-time bounds.
 *
 * A decay law prescribes how fast the Lyapunov value V must fall:
 *
 *   Exp             sigma = c V
 *   FiniteTime      sigma = k V^g          0 < g < 1
 *   FixedTime       sigma = a V^g + b V^d  0 < g < 1 < d
 *   PrescribedTime  sigma = mu V / (T - t) t in [0, T)
 *
 * The prescribed-time gain mu plays the role of c*T in the inequality form
 * dV/dt <= -c T/(T - t) V.
 */

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "olfkit/error.hpp"

namespace olfkit {

struct ExpLaw {
  double c;
  bool operator==(const ExpLaw&) const = default;
};

struct FiniteTimeLaw {
  double k;
  double gamma_lo;
  bool operator==(const FiniteTimeLaw&) const = default;
};

struct FixedTimeLaw {
  double a;
  double b;
  double gamma_lo;
  double gamma_hi;
  bool operator==(const FixedTimeLaw&) const = default;
};

struct PrescribedTimeLaw {
  double mu;
  double horizon;
  bool operator==(const PrescribedTimeLaw&) const = default;
};

enum class LawKind { Exp, FiniteTime, FixedTime, PrescribedTime };

constexpr std::string_view to_string(LawKind kind) {
  switch (kind) {
    case LawKind::Exp: return "exp";
    case LawKind::FiniteTime: return "ft";
    case LawKind::FixedTime: return "fxt";
    case LawKind::PrescribedTime: return "pt";
  }
  return "?";
}

/// Validated decay law. Construct through the static factories.
class DecayLaw {
 public:
  using Params = std::variant<ExpLaw, FiniteTimeLaw, FixedTimeLaw, PrescribedTimeLaw>;

  static DecayLaw exponential(double c) {
    require(c > 0.0, ErrorCode::InvalidArgument, "exp law requires c > 0");
    return DecayLaw(ExpLaw{c});
  }

  static DecayLaw finite_time(double k, double gamma_lo) {
    require(k > 0.0, ErrorCode::InvalidArgument, "ft law requires k > 0");
    require(gamma_lo > 0.0 && gamma_lo < 1.0, ErrorCode::InvalidArgument,
            "ft law requires gamma in (0,1)");
    return DecayLaw(FiniteTimeLaw{k, gamma_lo});
  }

  static DecayLaw fixed_time(double a, double b, double gamma_lo, double gamma_hi) {
    require(a > 0.0 && b > 0.0, ErrorCode::InvalidArgument, "fxt law requires a > 0 and b > 0");
    require(gamma_lo > 0.0 && gamma_lo < 1.0, ErrorCode::InvalidArgument,
            "fxt law requires gamma in (0,1)");
    require(gamma_hi > 1.0, ErrorCode::InvalidArgument, "fxt law requires delta > 1");
    return DecayLaw(FixedTimeLaw{a, b, gamma_lo, gamma_hi});
  }

  static DecayLaw prescribed_time(double mu, double horizon) {
    require(mu > 0.0, ErrorCode::InvalidArgument, "pt law requires mu > 0");
    require(horizon > 0.0, ErrorCode::InvalidArgument, "pt law requires T > 0");
    return DecayLaw(PrescribedTimeLaw{mu, horizon});
  }

  [[nodiscard]] LawKind kind() const { return static_cast<LawKind>(params_.index()); }
  [[nodiscard]] const Params& params() const { return params_; }

  template <class T>
  [[nodiscard]] const T& as() const {
    return std::get<T>(params_);
  }

  /// Horizon T for prescribed-time laws, empty otherwise.
  [[nodiscard]] std::optional<double> horizon() const {
    if (const auto* pt = std::get_if<PrescribedTimeLaw>(&params_)) return pt->horizon;
    return std::nullopt;
  }

  friend bool operator==(const DecayLaw&, const DecayLaw&) = default;

 private:
  explicit DecayLaw(Params p) : params_(p) {}
  Params params_;
};

namespace detail {

// V^p for V >= 0; V = 0 short-circuits so fractional powers never see log(0).
inline double pow_nonneg(double v, double p) {
  if (v <= 0.0) return 0.0;
  return std::exp(p * std::log(v));
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace detail

/// Required decay rate sigma(V, t). Throws HorizonExceeded for t >= T under a
/// prescribed-time law.
inline double sigma_eval(const DecayLaw& law, double v, double t) {
  require(v >= 0.0, ErrorCode::InvalidArgument, "sigma_eval requires V >= 0");
  return std::visit(
      detail::overloaded{
          [&](const ExpLaw& l) { return l.c * v; },
          [&](const FiniteTimeLaw& l) { return l.k * detail::pow_nonneg(v, l.gamma_lo); },
          [&](const FixedTimeLaw& l) {
            return l.a * detail::pow_nonneg(v, l.gamma_lo) + l.b * detail::pow_nonneg(v, l.gamma_hi);
          },
          [&](const PrescribedTimeLaw& l) {
            if (t >= l.horizon) {
              throw Error(ErrorCode::HorizonExceeded,
                          "t = " + std::to_string(t) + " >= T = " + std::to_string(l.horizon));
            }
            if (v == 0.0) return 0.0;
            return l.mu * v / (l.horizon - t);
          }},
      law.params());
}

/// Analytic upper bound on the time for V to reach zero from v0. Exponential
/// laws only converge asymptotically and return nothing.
inline std::optional<double> settling_bound(const DecayLaw& law, double v0) {
  require(v0 >= 0.0, ErrorCode::InvalidArgument, "settling_bound requires V0 >= 0");
  return std::visit(
      detail::overloaded{
          [](const ExpLaw&) -> std::optional<double> { return std::nullopt; },
          [&](const FiniteTimeLaw& l) -> std::optional<double> {
            return detail::pow_nonneg(v0, 1.0 - l.gamma_lo) / (l.k * (1.0 - l.gamma_lo));
          },
          [](const FixedTimeLaw& l) -> std::optional<double> {
            return 1.0 / (l.a * (1.0 - l.gamma_lo)) + 1.0 / (l.b * (l.gamma_hi - 1.0));
          },
          [](const PrescribedTimeLaw& l) -> std::optional<double> { return l.horizon; }},
      law.params());
}

}  // namespace olfkit
