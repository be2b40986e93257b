#pragma once

/**
 * @file oracle.hpp
 * @brief Direct-factorization ground truth for problems whose KKT system is
 *        affine once the active set is fixed.
 *
 * These routines never run the dynamics; tests compare integrated end states
 * against them.
 */

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "olfkit/error.hpp"
#include "olfkit/model.hpp"

namespace olfkit {

/**
 * Affine variational KKT data:
 *
 *   F(x) = M x + c,   G x <= h,   A x = b
 *
 * with stationarity F(x) + G^T lambda + A^T mu = 0. M need not be symmetric
 * (games and saddle problems).
 */
struct AffineKkt {
  Matrix field_matrix;
  Vector field_offset;
  Matrix ineq_matrix;
  Vector ineq_rhs;
  Matrix eq_matrix;
  Vector eq_rhs;

  [[nodiscard]] Index n() const { return field_matrix.cols(); }
  [[nodiscard]] Index m() const { return ineq_matrix.rows(); }
  [[nodiscard]] Index q() const { return eq_matrix.rows(); }

  void validate() const {
    const Index n_ = n();
    require(field_matrix.rows() == n_ && field_offset.size() == n_, ErrorCode::ConstructionError,
            "affine field shape mismatch");
    require(ineq_matrix.cols() == n_ && ineq_rhs.size() == m(), ErrorCode::ConstructionError,
            "inequality shape mismatch");
    require(eq_matrix.cols() == n_ && eq_rhs.size() == q(), ErrorCode::ConstructionError, "equality shape mismatch");
  }
};

/// Solves the square KKT system with the given inequalities held active.
/// Returns z = col(x, lambda, mu) with lambda_i = 0 on inactive rows.
inline Vector oracle_kkt_affine(const AffineKkt& k, const std::vector<bool>& active) {
  k.validate();
  const Index n = k.n(), m = k.m(), q = k.q();
  require(static_cast<Index>(active.size()) == m, ErrorCode::InvalidArgument, "active set size mismatch");

  std::vector<Index> rows;
  for (Index i = 0; i < m; ++i)
    if (active[static_cast<std::size_t>(i)]) rows.push_back(i);
  const Index a = static_cast<Index>(rows.size());
  const Index dim = n + a + q;

  Matrix kkt = Matrix::Zero(dim, dim);
  Vector rhs = Vector::Zero(dim);
  kkt.topLeftCorner(n, n) = k.field_matrix;
  rhs.head(n) = -k.field_offset;
  for (Index r = 0; r < a; ++r) {
    kkt.block(0, n + r, n, 1) = k.ineq_matrix.row(rows[r]).transpose();
    kkt.block(n + r, 0, 1, n) = k.ineq_matrix.row(rows[r]);
    rhs[n + r] = k.ineq_rhs[rows[r]];
  }
  kkt.block(0, n + a, n, q) = k.eq_matrix.transpose();
  kkt.block(n + a, 0, q, n) = k.eq_matrix;
  rhs.tail(q) = k.eq_rhs;

  Eigen::FullPivLU<Matrix> lu(kkt);
  if (lu.rank() < dim) throw Error(ErrorCode::OracleFailure, "KKT matrix is singular for this active set");
  const Vector sol = lu.solve(rhs);

  Vector z = Vector::Zero(n + m + q);
  z.head(n) = sol.head(n);
  for (Index r = 0; r < a; ++r) z[n + rows[r]] = sol[n + r];
  z.tail(q) = sol.tail(q);
  return z;
}

/// All inequalities active.
inline Vector oracle_kkt_affine(const AffineKkt& k) { return oracle_kkt_affine(k, std::vector<bool>(k.m(), true)); }

/**
 * Enumerates every active set, keeps candidates that are primal feasible
 * (G x - h <= tol) with nonnegative multipliers (lambda >= -tol), and returns
 * the unique survivor. Candidates that coincide to 1e-8 count once, which
 * covers degenerate (weakly active) constraints.
 */
inline Vector oracle_active_set(const AffineKkt& k, double tol = 1e-9) {
  k.validate();
  const Index m = k.m();
  require(m <= 16, ErrorCode::InvalidArgument, "active-set enumeration is limited to 16 inequalities");
  const Index n = k.n();

  std::vector<Vector> survivors;
  std::vector<bool> active(static_cast<std::size_t>(m));
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    for (Index i = 0; i < m; ++i) active[static_cast<std::size_t>(i)] = (mask >> i) & 1u;
    Vector z;
    try {
      z = oracle_kkt_affine(k, active);
    } catch (const Error&) {
      continue;
    }
    const Vector x = z.head(n);
    const Vector lam = z.segment(n, m);
    if (m > 0 && ((k.ineq_matrix * x - k.ineq_rhs).maxCoeff() > tol || lam.minCoeff() < -tol)) continue;
    bool duplicate = false;
    for (const Vector& s : survivors) duplicate = duplicate || (s - z).cwiseAbs().maxCoeff() <= 1e-8;
    if (!duplicate) survivors.push_back(z);
  }
  if (survivors.size() != 1) {
    throw Error(ErrorCode::OracleAmbiguous,
                std::to_string(survivors.size()) + " active sets satisfy the KKT conditions");
  }
  return survivors.front();
}

}  // namespace olfkit
