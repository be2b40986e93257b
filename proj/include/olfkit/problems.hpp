#pragma once

/**
 * @file problems.hpp
 * @brief Benchmark problem builders and their reference solutions.
 *
 * Every builder returns the problem description, a serializable
 * BenchmarkSpec carrying all numbers needed to rebuild it, and, where the KKT
 * system is affine, the AffineKkt data for the direct oracle.
 */

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "olfkit/encodings.hpp"
#include "olfkit/error.hpp"
#include "olfkit/law.hpp"
#include "olfkit/model.hpp"
#include "olfkit/oracle.hpp"

namespace olfkit {

struct BenchmarkSpec {
  std::string name;
  std::string encoding;  // unconstrained | constrained_fb | constrained_exact | minimax | gne
  std::map<std::string, Index> dims;
  std::map<std::string, std::vector<double>> params;
  Vector z0;
  std::vector<DecayLaw> laws;  // recommended exp, ft, fxt, pt
  std::optional<Vector> solution;
  std::optional<double> strong_monotonicity;
  double eps = 1e-6;
  std::string note;

  bool operator==(const BenchmarkSpec& o) const {
    auto same_vec = [](const Vector& a, const Vector& b) { return a.size() == b.size() && a == b; };
    const bool same_solution =
        solution.has_value() == o.solution.has_value() && (!solution || same_vec(*solution, *o.solution));
    return name == o.name && encoding == o.encoding && dims == o.dims && params == o.params &&
           same_vec(z0, o.z0) && laws == o.laws && same_solution && strong_monotonicity == o.strong_monotonicity &&
           eps == o.eps && note == o.note;
  }
};

/// Exp c=1, FT k=1 gamma=1/2, FxT a=b=1 gamma=1/2 delta=2, PT with the given gain and horizon.
inline std::vector<DecayLaw> default_laws(double pt_mu, double pt_horizon) {
  return {DecayLaw::exponential(1.0), DecayLaw::finite_time(1.0, 0.5), DecayLaw::fixed_time(1.0, 1.0, 0.5, 2.0),
          DecayLaw::prescribed_time(pt_mu, pt_horizon)};
}

inline const DecayLaw& recommended_law(const BenchmarkSpec& spec, LawKind kind) {
  for (const auto& l : spec.laws)
    if (l.kind() == kind) return l;
  throw Error(ErrorCode::InvalidArgument, "benchmark " + spec.name + " has no recommended law for this kind");
}

namespace detail {

inline std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }
inline Vector to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

inline const std::vector<double>& param(const BenchmarkSpec& s, const std::string& key) {
  auto it = s.params.find(key);
  require(it != s.params.end(), ErrorCode::ConstructionError, "benchmark " + s.name + " lacks parameter " + key);
  return it->second;
}

inline Index dim(const BenchmarkSpec& s, const std::string& key) {
  auto it = s.dims.find(key);
  require(it != s.dims.end(), ErrorCode::ConstructionError, "benchmark " + s.name + " lacks dimension " + key);
  return it->second;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Unconstrained

struct UnconstrainedBenchmark {
  UnconstrainedProblem problem;
  BenchmarkSpec spec;
};

/// J(x) = 0.5 x^T A x - b^T x.
inline UnconstrainedBenchmark build_quadratic(const Matrix& a, const Vector& b, const Vector& x0) {
  const Index n = a.rows();
  require(a.cols() == n && b.size() == n && x0.size() == n, ErrorCode::ConstructionError, "quadratic shape mismatch");
  UnconstrainedProblem p;
  p.n_x = n;
  p.name = "quadratic";
  p.grad_J = [a, b](const Vector& x) -> Vector { return a * x - b; };
  p.hess_J = [a](const Vector&) -> Matrix { return a; };
  const Matrix sym = 0.5 * (a + a.transpose());
  const double m = Eigen::SelfAdjointEigenSolver<Matrix>(sym, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  if (m > 0.0) p.strong_convexity = m;

  BenchmarkSpec s;
  s.name = "quadratic";
  s.encoding = "unconstrained";
  s.dims = {{"n", n}};
  s.params = {{"A", detail::to_std(Eigen::Map<const Vector>(a.data(), a.size()))}, {"b", detail::to_std(b)}};
  s.z0 = x0;
  s.laws = default_laws(6.0, 5.0);
  if (m > 0.0) {
    s.solution = Vector(a.fullPivLu().solve(b));
    s.strong_monotonicity = m;
  }
  return {std::move(p), std::move(s)};
}

/**
 * J(x) = log(sum_i (e^{x_i} + e^{-x_i})) + 0.5 |x|^2.
 *
 * With s_i = 2 sinh x_i, c_i = 2 cosh x_i and Z = sum c_i:
 *   grad J = s / Z + x,   Hess J = diag(c) / Z - s s^T / Z^2 + I.
 * Exponentials are shifted by max|x_i| so large arguments do not overflow.
 */
inline UnconstrainedBenchmark build_logsumexp(Index n) {
  require(n >= 1, ErrorCode::ConstructionError, "log-sum-exp needs n >= 1");
  struct Terms {
    Vector s, c;
    double z;
  };
  auto terms = [](const Vector& x) {
    const double shift = x.cwiseAbs().maxCoeff();
    const Vector ep = (x.array() - shift).exp().matrix();
    const Vector em = (-x.array() - shift).exp().matrix();
    return Terms{ep - em, ep + em, (ep + em).sum()};
  };

  UnconstrainedProblem p;
  p.n_x = n;
  p.name = "logsumexp";
  p.strong_convexity = 1.0;
  p.grad_J = [terms](const Vector& x) -> Vector {
    const Terms t = terms(x);
    return t.s / t.z + x;
  };
  p.hess_J = [terms](const Vector& x) -> Matrix {
    const Terms t = terms(x);
    Matrix h = -(t.s * t.s.transpose()) / (t.z * t.z);
    h.diagonal() += t.c / t.z + Vector::Ones(x.size());
    return h;
  };

  BenchmarkSpec s;
  s.name = "logsumexp";
  s.encoding = "unconstrained";
  s.dims = {{"n", n}};
  s.z0 = Vector::Ones(n);
  s.laws = default_laws(6.0, 5.0);
  s.solution = Vector::Zero(n);
  s.strong_monotonicity = 1.0;
  return {std::move(p), std::move(s)};
}

/// Objective value of the log-sum-exp benchmark (tests only need it at a few points).
inline double logsumexp_value(const Vector& x) {
  const double shift = x.cwiseAbs().maxCoeff();
  const double sum = ((x.array() - shift).exp() + (-x.array() - shift).exp()).sum();
  return shift + std::log(sum) + 0.5 * x.squaredNorm();
}

// ---------------------------------------------------------------------------
// Constrained

struct ConstrainedBenchmark {
  ConstrainedProblem problem;
  BenchmarkSpec spec;
  std::optional<AffineKkt> affine;
};

/// min 0.5 |x|^2 s.t. x_1 >= 1, written as g(x) = 1 - x_1 <= 0.
/// Solution x = e_1, lambda = 1.
inline ConstrainedBenchmark build_halfspace_qp(Index n = 2, double eps = 1e-6) {
  require(n >= 1, ErrorCode::ConstructionError, "halfspace QP needs n >= 1");
  Matrix g = Matrix::Zero(1, n);
  g(0, 0) = -1.0;
  const Vector h = Vector::Constant(1, -1.0);

  ConstrainedProblem p;
  p.n_x = n;
  p.name = "halfspace_qp";
  p.grad_J = [](const Vector& x) -> Vector { return x; };
  p.hess_J = [](const Vector& x) -> Matrix { return Matrix::Identity(x.size(), x.size()); };
  p.ineq = ConstraintMap::affine(g, h);
  p.eq = ConstraintMap::none(n);
  p.eps = eps;

  AffineKkt k{Matrix::Identity(n, n), Vector::Zero(n), g, h, Matrix(0, n), Vector(0)};

  BenchmarkSpec s;
  s.name = "halfspace_qp";
  s.encoding = "constrained_fb";
  s.dims = {{"n", n}};
  s.z0 = Vector::Zero(n + 1);
  s.z0[0] = 2.0;
  if (n > 1) s.z0[1] = 1.0;
  s.z0[n] = 0.5;
  s.laws = default_laws(6.0, 5.0);
  Vector sol = Vector::Zero(n + 1);
  sol[0] = 1.0;
  sol[n] = 1.0;
  s.solution = sol;
  s.eps = eps;
  return {std::move(p), std::move(s), std::move(k)};
}

/**
 * Network utility maximization in minimization form:
 *   min -sum_j alpha_j log x_j  s.t.  R x <= c.
 * The log domain is enforced by throwing DomainViolation when any rate drops
 * to x_min; no barrier is added.
 */
inline ConstrainedBenchmark build_num(const Matrix& routing, const Vector& capacity, const Vector& alpha,
                                      double eps = 1e-6, double x_min = 1e-9) {
  const Index links = routing.rows(), sources = routing.cols();
  require(capacity.size() == links && alpha.size() == sources, ErrorCode::ConstructionError, "NUM shape mismatch");
  require(sources >= 1 && links >= 1, ErrorCode::ConstructionError, "NUM needs sources and links");
  for (Index i = 0; i < links; ++i)
    for (Index j = 0; j < sources; ++j)
      require(routing(i, j) == 0.0 || routing(i, j) == 1.0, ErrorCode::ConstructionError,
              "routing matrix entries must be 0 or 1");
  for (Index j = 0; j < sources; ++j)
    require(routing.col(j).sum() >= 1.0, ErrorCode::ConstructionError, "every source must use a link");
  require((capacity.array() > 0.0).all(), ErrorCode::ConstructionError, "link capacities must be positive");
  require((alpha.array() > 0.0).all(), ErrorCode::ConstructionError, "utility weights must be positive");

  auto check_domain = [x_min](const Vector& x) {
    for (Index j = 0; j < x.size(); ++j)
      if (!(x[j] > x_min))
        throw Error(ErrorCode::DomainViolation, "source rate x_" + std::to_string(j) + " = " +
                                                    std::to_string(x[j]) + " left the log domain");
  };

  ConstrainedProblem p;
  p.n_x = sources;
  p.name = "num";
  p.grad_J = [alpha, check_domain](const Vector& x) -> Vector {
    check_domain(x);
    return -alpha.cwiseQuotient(x);
  };
  p.hess_J = [alpha, check_domain](const Vector& x) -> Matrix {
    check_domain(x);
    return alpha.cwiseQuotient(x.cwiseProduct(x)).asDiagonal();
  };
  p.ineq = ConstraintMap::affine(routing, capacity);
  p.eq = ConstraintMap::none(sources);
  p.eps = eps;

  BenchmarkSpec s;
  s.name = "num";
  s.encoding = "constrained_fb";
  s.dims = {{"links", links}, {"sources", sources}};
  s.params = {{"R", detail::to_std(Eigen::Map<const Vector>(routing.data(), routing.size()))},
              {"c", detail::to_std(capacity)},
              {"alpha", detail::to_std(alpha)}};
  s.z0 = Vector(sources + links);
  s.z0.head(sources).setConstant(0.25);
  s.z0.tail(links).setConstant(1.0);
  s.laws = default_laws(6.0, 5.0);
  s.eps = eps;
  s.note = "stand-in instance: topology, weights and initial rates are not taken from a published run";
  if (links == 1) {
    // One saturated link: alpha_j / x_j = lambda, sum_j x_j = c.
    const double lam = alpha.sum() / capacity[0];
    Vector sol(sources + 1);
    sol.head(sources) = alpha / lam;
    sol[sources] = lam;
    s.solution = sol;
  }
  return {std::move(p), std::move(s), std::nullopt};
}

/// Two sources sharing one unit-capacity link with unit weights.
inline ConstrainedBenchmark build_num_default() {
  return build_num(Matrix::Ones(1, 2), Vector::Ones(1), Vector::Ones(2));
}

/**
 * Strongly convex QP with a full-row-rank affine equality, two affine
 * inequalities and one convex quadratic inequality:
 *
 *   min 0.5 x^T Q x + c^T x
 *   s.t. sum x = 1,  x_1 <= 0.8,  -x_2 <= 0.5,  |x|^2 <= 4.
 */
inline ConstrainedBenchmark build_convex_qp(double eps = 1e-6) {
  const Index n = 4;
  Matrix l(n, n);
  l << 1.0, 0.0, 0.0, 0.0,  //
      0.5, 1.2, 0.0, 0.0,   //
      -0.3, 0.4, 0.9, 0.0,  //
      0.2, -0.6, 0.1, 1.1;
  const Matrix q = l * l.transpose() + 0.5 * Matrix::Identity(n, n);
  Vector c(n);
  c << -1.0, 0.5, 0.25, -0.75;

  Matrix g_aff = Matrix::Zero(2, n);
  g_aff(0, 0) = 1.0;
  g_aff(1, 1) = -1.0;
  Vector h_aff(2);
  h_aff << 0.8, 0.5;

  ConstraintMap ineq;
  ineq.dim = 3;
  ineq.value = [g_aff, h_aff](const Vector& x) -> Vector {
    Vector v(3);
    v.head(2) = g_aff * x - h_aff;
    v[2] = x.squaredNorm() - 4.0;
    return v;
  };
  ineq.jacobian = [g_aff](const Vector& x) -> Matrix {
    Matrix j(3, x.size());
    j.topRows(2) = g_aff;
    j.row(2) = 2.0 * x.transpose();
    return j;
  };
  ineq.weighted_hessian = [](const Vector& x, const Vector& w) -> Matrix {
    return 2.0 * w[2] * Matrix::Identity(x.size(), x.size());
  };

  ConstrainedProblem p;
  p.n_x = n;
  p.name = "convex_qp";
  p.grad_J = [q, c](const Vector& x) -> Vector { return q * x + c; };
  p.hess_J = [q](const Vector&) -> Matrix { return q; };
  p.ineq = std::move(ineq);
  p.eq = ConstraintMap::affine(Matrix::Ones(1, n), Vector::Ones(1));
  p.eps = eps;

  BenchmarkSpec s;
  s.name = "convex_qp";
  s.encoding = "constrained_fb";
  s.dims = {{"n", n}};
  s.z0 = Vector::Zero(n + 3 + 1);
  s.z0.head(n).setConstant(0.5);
  s.z0.segment(n, 3).setConstant(1.0);
  s.laws = default_laws(6.0, 5.0);
  s.strong_monotonicity =
      Eigen::SelfAdjointEigenSolver<Matrix>(q, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  s.eps = eps;
  return {std::move(p), std::move(s), std::nullopt};
}

// ---------------------------------------------------------------------------
// Minimax

struct MinimaxBenchmark {
  MinimaxProblem problem;
  BenchmarkSpec spec;
  AffineKkt affine;
};

enum class MinimaxVariant { Inequality, Equality };

/**
 * J(x, y) = 0.5 x^2 - 0.5 y^2 + x y over scalars.
 *  Inequality variant: x + y - 1 <= 0 (inactive, saddle at the origin).
 *  Equality variant:   x + y = 2 (saddle x = 0, y = 2, mu = -2).
 */
inline MinimaxBenchmark build_minimax_toy(MinimaxVariant variant = MinimaxVariant::Inequality, double eps = 1e-6) {
  MinimaxProblem p;
  p.n_x = 1;
  p.n_y = 1;
  p.grad_x = [](const Vector& w) -> Vector { return Vector::Constant(1, w[0] + w[1]); };
  p.grad_y = [](const Vector& w) -> Vector { return Vector::Constant(1, w[0] - w[1]); };
  p.hess_xx = [](const Vector&) -> Matrix { return Matrix::Constant(1, 1, 1.0); };
  p.hess_xy = [](const Vector&) -> Matrix { return Matrix::Constant(1, 1, 1.0); };
  p.hess_yx = [](const Vector&) -> Matrix { return Matrix::Constant(1, 1, 1.0); };
  p.hess_yy = [](const Vector&) -> Matrix { return Matrix::Constant(1, 1, -1.0); };

  Matrix field(2, 2);
  field << 1.0, 1.0, -1.0, 1.0;
  AffineKkt k{field, Vector::Zero(2), Matrix(0, 2), Vector(0), Matrix(0, 2), Vector(0)};

  BenchmarkSpec s;
  s.encoding = "minimax";
  s.dims = {{"n_x", 1}, {"n_y", 1}};
  s.laws = default_laws(6.0, 5.0);
  s.eps = eps;
  if (variant == MinimaxVariant::Inequality) {
    p.name = s.name = "minimax";
    p.ineq = ConstraintMap::affine(Matrix::Ones(1, 2), Vector::Ones(1));
    p.A = Matrix(0, 1);
    p.B = Matrix(0, 1);
    p.b = Vector(0);
    k.ineq_matrix = Matrix::Ones(1, 2);
    k.ineq_rhs = Vector::Ones(1);
    s.z0 = Vector(3);
    s.z0 << 1.0, 0.5, 1.0;
    s.solution = Vector::Zero(3);
  } else {
    p.name = s.name = "minimax_eq";
    p.ineq = ConstraintMap::none(2);
    p.A = Matrix::Ones(1, 1);
    p.B = Matrix::Ones(1, 1);
    p.b = Vector::Constant(1, 2.0);
    k.eq_matrix = Matrix::Ones(1, 2);
    k.eq_rhs = Vector::Constant(1, 2.0);
    s.z0 = Vector(3);
    s.z0 << 1.0, 0.5, 0.0;
    Vector sol(3);
    sol << 0.0, 2.0, -2.0;
    s.solution = sol;
  }
  return {std::move(p), std::move(s), std::move(k)};
}

// ---------------------------------------------------------------------------
// Generalized Nash

struct GneBenchmark {
  GNEProblem problem;
  BenchmarkSpec spec;
  AffineKkt affine;
};

/**
 * Cournot competition: N firms each supplying M markets, x_k in R^M.
 * Firm k minimizes 0.5 |x_k|^2 - p(Cx)^T x_k with inverse demand
 * p = price_cap - D C x, where C = [I ... I] aggregates supply. Shared
 * constraints: first-market supply equals `target`, market capacities
 * C x <= capacity, and nonnegativity -x <= 0.
 *
 * Pseudogradient block k: x_k - price_cap + D C x + D x_k, which is affine
 * with constant Jacobian kron(1 1^T, D) + kron(I, I + D) (D diagonal).
 */
inline GneBenchmark build_cournot(Index firms, const Vector& price_cap, const Vector& demand_slope, double target,
                                  const Vector& capacity, double eps = 1e-6) {
  const Index markets = price_cap.size();
  require(firms >= 1 && markets >= 1, ErrorCode::ConstructionError, "Cournot needs firms and markets");
  require(demand_slope.size() == markets && capacity.size() == markets, ErrorCode::ConstructionError,
          "Cournot market data shape mismatch");
  const Index n = firms * markets;
  const Matrix d = demand_slope.asDiagonal();

  Matrix agg(markets, n);
  for (Index k = 0; k < firms; ++k) agg.middleCols(k * markets, markets).setIdentity();

  Matrix jac = Matrix::Zero(n, n);
  for (Index k = 0; k < firms; ++k)
    for (Index l = 0; l < firms; ++l) {
      jac.block(k * markets, l * markets, markets, markets) = d;
      if (k == l) jac.block(k * markets, l * markets, markets, markets) += Matrix::Identity(markets, markets) + d;
    }
  const Vector offset = -price_cap.replicate(firms, 1);

  Matrix g(markets + n, n);
  g << agg, -Matrix::Identity(n, n);
  Vector h(markets + n);
  h << capacity, Vector::Zero(n);
  const Matrix a = agg.topRows(1);
  const Vector b = Vector::Constant(1, target);

  GNEProblem p;
  p.name = "cournot";
  p.player_dims.assign(static_cast<std::size_t>(firms), markets);
  p.pseudogradient = [jac, offset](const Vector& x) -> Vector { return jac * x + offset; };
  p.pseudogradient_jacobian = [jac](const Vector&) -> Matrix { return jac; };
  p.ineq = ConstraintMap::affine(g, h);
  p.A = a;
  p.b = b;
  const Matrix sym = 0.5 * (jac + jac.transpose());
  p.strong_monotonicity = Eigen::SelfAdjointEigenSolver<Matrix>(sym, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();

  AffineKkt k{jac, offset, g, h, a, b};

  BenchmarkSpec s;
  s.name = "cournot";
  s.encoding = "gne";
  s.dims = {{"firms", firms}, {"markets", markets}};
  s.params = {{"price_cap", detail::to_std(price_cap)},
              {"demand_slope", detail::to_std(demand_slope)},
              {"target", {target}},
              {"capacity", detail::to_std(capacity)}};
  s.z0 = Vector::Zero(n + markets + n + 1);
  s.z0.head(n).setConstant(1.0);
  s.z0.segment(n, markets + n).setConstant(1.0);
  s.laws = default_laws(6.0, 5.0);
  s.strong_monotonicity = p.strong_monotonicity;
  s.eps = eps;
  s.note = "initial production, multipliers and law parameters are artifact choices";
  return {std::move(p), std::move(s), std::move(k)};
}

/// Four firms, two markets, price caps (10, 8), D = I, first-market supply 12,
/// capacities (20, 15).
inline GneBenchmark build_cournot() {
  return build_cournot(4, Eigen::Vector2d(10.0, 8.0), Eigen::Vector2d(1.0, 1.0), 12.0, Eigen::Vector2d(20.0, 15.0));
}

// ---------------------------------------------------------------------------
// Spec-driven construction

/// A benchmark ready to solve: the model, its spec and the affine oracle data if any.
struct Benchmark {
  BenchmarkSpec spec;
  std::shared_ptr<const StationarityModel> model;
  std::optional<AffineKkt> affine;
  Index primal_dim = 0;
  VectorFn ineq;  // g(x) <= 0 over the primal block, empty when unconstrained
  VectorFn eq;    // h(x) = 0 over the primal block, empty when unconstrained
};

/// Primal feasibility of a state: max(0, max_i g_i) and |h|.
struct Feasibility {
  double max_ineq = 0.0;
  double eq_norm = 0.0;
};

inline Feasibility feasibility(const Benchmark& b, const Vector& z) {
  require(z.size() == b.model->dimension(), ErrorCode::InvalidArgument, "state dimension mismatch");
  Feasibility f;
  const Vector x = z.head(b.primal_dim);
  if (b.ineq) {
    const Vector g = b.ineq(x);
    if (g.size() > 0) f.max_ineq = std::max(0.0, g.maxCoeff());
  }
  if (b.eq) f.eq_norm = b.eq(x).norm();
  return f;
}

/// Rebuilds a benchmark from its spec. The spec's z0, laws and eps are kept;
/// the problem data comes from dims and params.
inline Benchmark make_benchmark(const BenchmarkSpec& spec) {
  Benchmark b;
  const std::string& name = spec.name;
  auto set_constraints = [&b](const ConstrainedProblem& p) {
    b.primal_dim = p.n_x;
    b.ineq = p.ineq.value;
    b.eq = p.eq.value;
  };
  if (name == "logsumexp") {
    auto ub = build_logsumexp(detail::dim(spec, "n"));
    b.primal_dim = ub.problem.n_x;
    b.model = encode_unconstrained(std::move(ub.problem));
  } else if (name == "quadratic") {
    const Index n = detail::dim(spec, "n");
    const auto& av = detail::param(spec, "A");
    require(static_cast<Index>(av.size()) == n * n, ErrorCode::ConstructionError, "quadratic A has wrong size");
    const Matrix a = Eigen::Map<const Matrix>(av.data(), n, n);
    auto ub = build_quadratic(a, detail::to_eigen(detail::param(spec, "b")), spec.z0);
    b.primal_dim = n;
    b.model = encode_unconstrained(std::move(ub.problem));
  } else if (name == "halfspace_qp") {
    auto cb = build_halfspace_qp(detail::dim(spec, "n"), spec.eps);
    b.affine = cb.affine;
    set_constraints(cb.problem);
    if (spec.encoding == "constrained_exact") b.model = encode_constrained_exact(std::move(cb.problem));
    else b.model = encode_constrained_fb(cb.problem);
  } else if (name == "num") {
    const Index links = detail::dim(spec, "links"), sources = detail::dim(spec, "sources");
    const auto& rv = detail::param(spec, "R");
    require(static_cast<Index>(rv.size()) == links * sources, ErrorCode::ConstructionError, "NUM R has wrong size");
    const Matrix r = Eigen::Map<const Matrix>(rv.data(), links, sources);
    auto cb = build_num(r, detail::to_eigen(detail::param(spec, "c")), detail::to_eigen(detail::param(spec, "alpha")),
                        spec.eps);
    set_constraints(cb.problem);
    if (spec.encoding == "constrained_exact") b.model = encode_constrained_exact(std::move(cb.problem));
    else b.model = encode_constrained_fb(cb.problem);
  } else if (name == "convex_qp") {
    auto cb = build_convex_qp(spec.eps);
    set_constraints(cb.problem);
    if (spec.encoding == "constrained_exact") b.model = encode_constrained_exact(std::move(cb.problem));
    else b.model = encode_constrained_fb(cb.problem);
  } else if (name == "minimax" || name == "minimax_eq") {
    auto mb = build_minimax_toy(name == "minimax" ? MinimaxVariant::Inequality : MinimaxVariant::Equality, spec.eps);
    b.affine = mb.affine;
    b.primal_dim = mb.problem.n_x + mb.problem.n_y;
    b.ineq = mb.problem.ineq.value;
    if (mb.problem.A.rows() > 0) {
      Matrix ab(mb.problem.A.rows(), b.primal_dim);
      ab << mb.problem.A, mb.problem.B;
      b.eq = [ab, rhs = mb.problem.b](const Vector& w) -> Vector { return ab * w - rhs; };
    }
    b.model = encode_minimax(mb.problem, spec.eps);
  } else if (name == "cournot") {
    const auto& target = detail::param(spec, "target");
    require(target.size() == 1, ErrorCode::ConstructionError, "Cournot target must be a scalar");
    auto gb = build_cournot(detail::dim(spec, "firms"), detail::to_eigen(detail::param(spec, "price_cap")),
                            detail::to_eigen(detail::param(spec, "demand_slope")), target[0],
                            detail::to_eigen(detail::param(spec, "capacity")), spec.eps);
    b.affine = gb.affine;
    b.primal_dim = gb.problem.n();
    b.ineq = gb.problem.ineq.value;
    b.eq = [a = gb.problem.A, rhs = gb.problem.b](const Vector& x) -> Vector { return a * x - rhs; };
    b.model = encode_gne(gb.problem, spec.eps);
  } else {
    throw Error(ErrorCode::ConstructionError, "unknown benchmark '" + name + "'");
  }
  require(spec.z0.size() == b.model->dimension(), ErrorCode::ConstructionError,
          "benchmark " + name + " initial state has dimension " + std::to_string(spec.z0.size()) + ", model expects " +
              std::to_string(b.model->dimension()));
  b.spec = spec;
  return b;
}

/// Default spec for a built-in benchmark name.
inline BenchmarkSpec default_spec(const std::string& name) {
  if (name == "logsumexp") return build_logsumexp(50).spec;
  if (name == "quadratic") return build_quadratic(Matrix::Identity(2, 2), Vector::Zero(2), Eigen::Vector2d(1.0, 0.0)).spec;
  if (name == "halfspace_qp") return build_halfspace_qp().spec;
  if (name == "halfspace_qp_exact") {
    BenchmarkSpec s = build_halfspace_qp().spec;
    s.encoding = "constrained_exact";
    return s;
  }
  if (name == "num") return build_num_default().spec;
  if (name == "convex_qp") return build_convex_qp().spec;
  if (name == "minimax") return build_minimax_toy(MinimaxVariant::Inequality).spec;
  if (name == "minimax_eq") return build_minimax_toy(MinimaxVariant::Equality).spec;
  if (name == "cournot") return build_cournot().spec;
  throw Error(ErrorCode::ConstructionError, "unknown benchmark '" + name + "'");
}

inline std::vector<std::string> builtin_benchmarks() {
  return {"logsumexp", "quadratic",  "halfspace_qp", "halfspace_qp_exact", "num",
          "convex_qp", "minimax", "minimax_eq",   "cournot"};
}

}  // namespace olfkit
