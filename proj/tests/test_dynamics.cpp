#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "olfkit/dynamics.hpp"
#include "olfkit/problems.hpp"
#include "test_support.hpp"

using namespace olfkit;
using olfkit::testing::AffineModel;
using olfkit::testing::random_vector;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

// Well-conditioned nonsymmetric matrix whose symmetric part is m I.
Matrix shifted_skew(Index n, double m, std::mt19937_64& rng) {
  Matrix k(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) k(i, j) = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
  return m * Matrix::Identity(n, n) + 0.5 * (k - k.transpose());
}

}  // namespace

TEST(Dynamics, HgdOnIdentityResidual) {
  const AffineModel m(Matrix::Identity(2, 2), Vector::Zero(2));
  const Vector u = hgd_field(m, DecayLaw::exponential(1.0), Eigen::Vector2d(1.0, 0.0), 0.0);
  EXPECT_NEAR(u[0], -0.5, 1e-15);
  EXPECT_NEAR(u[1], 0.0, 1e-15);
}

TEST(Dynamics, NdOnScaledResidual) {
  const AffineModel m(2.0 * Matrix::Identity(2, 2), Vector::Zero(2));
  const Vector u = nd_field(m, DecayLaw::exponential(2.0), Eigen::Vector2d(1.0, 0.0), 0.0);
  EXPECT_NEAR(u[0], -1.0, 1e-15);
  EXPECT_NEAR(u[1], 0.0, 1e-15);
}

TEST(Dynamics, GdOnIdentityResidual) {
  const AffineModel m(Matrix::Identity(2, 2), Vector::Zero(2));
  const Vector u = gd_field(m, DecayLaw::exponential(2.0), Eigen::Vector2d(1.0, 0.0), 0.0, 1.0);
  EXPECT_NEAR(u[0], -1.0, 1e-15);
  EXPECT_NEAR(u[1], 0.0, 1e-15);
}

TEST(Dynamics, HgdAndNdEnforceExactDecay) {
  std::mt19937_64 rng(3);
  const AffineModel m(shifted_skew(5, 0.7, rng), random_vector(rng, 5, -1.0, 1.0));
  const std::vector<DecayLaw> laws = {DecayLaw::exponential(1.5), DecayLaw::finite_time(2.0, 0.3),
                                      DecayLaw::fixed_time(1.0, 0.5, 0.4, 1.7), DecayLaw::prescribed_time(3.0, 2.0)};
  for (const auto& law : laws) {
    for (auto r : {Realization::hgd(), Realization::nd()}) {
      for (int trial = 0; trial < 20; ++trial) {
        const Vector z = random_vector(rng, 5, -3.0, 3.0);
        const FieldEvaluation f = evaluate_field(m, law, r, z, 0.5);
        // Independent dV/dt: grad V = A^T S assembled here.
        const Matrix a = m.eval_jacobian(z);
        const double vdot = (a.transpose() * m.eval_S(z)).dot(f.u);
        EXPECT_NEAR(vdot, -f.sigma, 1e-12 * std::max(1.0, f.sigma)) << to_string(law.kind()) << to_string(r.kind);
      }
    }
  }
}

TEST(Dynamics, GdMeetsOneSidedDecayAndIsExactOnSkewShift) {
  std::mt19937_64 rng(5);
  const double mono = 0.8;
  const AffineModel exact(shifted_skew(4, mono, rng), Vector::Zero(4));
  Matrix a = shifted_skew(4, mono, rng);
  a += Matrix::Identity(4, 4) * 0.4;  // symmetric part 1.2 I >= 0.8 I
  const AffineModel loose(a, Vector::Ones(4));
  const auto law = DecayLaw::exponential(1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector z = random_vector(rng, 4, -2.0, 2.0);
    const FieldEvaluation fe = evaluate_field(exact, law, Realization::gd(mono), z, 0.0);
    EXPECT_NEAR(fe.v_dot(), -fe.sigma, 1e-12 * std::max(1.0, fe.sigma));
    const FieldEvaluation fl = evaluate_field(loose, law, Realization::gd(mono), z, 0.0);
    EXPECT_LE(fl.v_dot(), -fl.sigma + 1e-12 * std::max(1.0, fl.sigma));
    EXPECT_LT(fl.v_dot(), -fl.sigma * 1.2);
  }
}

TEST(Dynamics, FieldScalesWithRate) {
  const AffineModel m((Matrix(2, 2) << 2.0, 1.0, -1.0, 3.0).finished(), Eigen::Vector2d(0.5, -0.2));
  const Vector z = Eigen::Vector2d(0.3, -1.1);
  for (auto r : {Realization::hgd(), Realization::nd(), Realization::gd(2.0)}) {
    const Vector u1 = evaluate_field(m, DecayLaw::exponential(1.0), r, z, 0.0).u;
    const Vector u2 = evaluate_field(m, DecayLaw::exponential(2.0), r, z, 0.0).u;
    EXPECT_LE((u2 - 2.0 * u1).norm(), 1e-14 * u1.norm()) << to_string(r.kind);
  }
}

TEST(Dynamics, HgdIsAntiparallelToHessianTimesGradient) {
  const Index n = 6;
  auto bench = build_logsumexp(n);
  const auto model = encode_unconstrained(bench.problem);
  // Gradient from the unshifted formula, Hessian by differencing it.
  auto grad = [](const Vector& x) {
    const Vector s = 2.0 * x.array().sinh().matrix();
    const double z = 2.0 * x.array().cosh().sum();
    return Vector(s / z + x);
  };
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector x = random_vector(rng, n, -2.0, 2.0);
    Matrix h(n, n);
    for (Index j = 0; j < n; ++j) {
      Vector xp = x, xm = x;
      xp[j] += 1e-6;
      xm[j] -= 1e-6;
      h.col(j) = (grad(xp) - grad(xm)) / 2e-6;
    }
    const Vector d = -(h * grad(x));
    const Vector u = hgd_field(*model, DecayLaw::exponential(1.0), x, 0.0);
    EXPECT_GT(u.dot(d) / (u.norm() * d.norm()), 1.0 - 1e-8);
  }
}

TEST(Dynamics, HgdReportsVanishingGradient) {
  // S = (z0, 1): grad V = (z0, 0) vanishes at z0 = 0 while V = 1/2.
  const AffineModel m((Matrix(2, 2) << 1.0, 0.0, 0.0, 0.0).finished(), Eigen::Vector2d(0.0, 1.0));
  EXPECT_EQ(code_of([&] { (void)hgd_field(m, DecayLaw::exponential(1.0), Eigen::Vector2d(0.0, 0.0), 0.0); }),
            ErrorCode::SingularityEncountered);
  EXPECT_EQ(code_of([&] { (void)nd_field(m, DecayLaw::exponential(1.0), Eigen::Vector2d(0.0, 0.0), 0.0); }),
            ErrorCode::JacobianSingular);
}

TEST(Dynamics, NonSquareModelsOnlySupportHgd) {
  const AffineModel m(Matrix::Ones(3, 2), Vector::Ones(3));
  const Vector z = Eigen::Vector2d(0.2, 0.1);
  EXPECT_NO_THROW((void)hgd_field(m, DecayLaw::exponential(1.0), z, 0.0));
  EXPECT_EQ(code_of([&] { (void)nd_field(m, DecayLaw::exponential(1.0), z, 0.0); }),
            ErrorCode::UnsupportedRealization);
  EXPECT_EQ(code_of([&] { (void)gd_field(m, DecayLaw::exponential(1.0), z, 0.0, 1.0); }),
            ErrorCode::UnsupportedRealization);
}

TEST(Dynamics, StationaryStateIsReported) {
  const AffineModel m(Matrix::Identity(2, 2), Vector::Zero(2));
  EXPECT_EQ(code_of([&] { (void)hgd_field(m, DecayLaw::exponential(1.0), Vector::Zero(2), 0.0); }),
            ErrorCode::ConvergedAlready);
}

TEST(Dynamics, GdRequiresPositiveMonotonicity) {
  EXPECT_EQ(code_of([] { (void)Realization::gd(0.0); }), ErrorCode::InvalidArgument);
}

TEST(Dynamics, PrescribedTimePastHorizonFails) {
  const AffineModel m(Matrix::Identity(2, 2), Vector::Zero(2));
  EXPECT_EQ(code_of([&] { (void)hgd_field(m, DecayLaw::prescribed_time(2.0, 1.0), Vector::Ones(2), 1.0); }),
            ErrorCode::HorizonExceeded);
}
