#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "olfkit/law.hpp"

using namespace olfkit;

namespace {

std::vector<DecayLaw> sample_laws() {
  return {DecayLaw::exponential(1.0), DecayLaw::finite_time(1.0, 0.5), DecayLaw::fixed_time(1.0, 1.0, 0.5, 2.0),
          DecayLaw::prescribed_time(2.0, 1.0)};
}

}  // namespace

TEST(Law, ExponentialRateIsLinear) { EXPECT_DOUBLE_EQ(sigma_eval(DecayLaw::exponential(1.0), 2.0, 0.0), 2.0); }

TEST(Law, FiniteTimeRate) {
  // 3 * 4^0.5
  EXPECT_DOUBLE_EQ(sigma_eval(DecayLaw::finite_time(3.0, 0.5), 4.0, 0.0), 6.0);
}

TEST(Law, FixedTimeRateSumsBothPowers) {
  // 4^0.5 + 4^2
  EXPECT_DOUBLE_EQ(sigma_eval(DecayLaw::fixed_time(1.0, 1.0, 0.5, 2.0), 4.0, 0.0), 18.0);
}

TEST(Law, PrescribedTimeRateGrowsTowardHorizon) {
  // 2 * 1 / (1 - 0.5)
  EXPECT_DOUBLE_EQ(sigma_eval(DecayLaw::prescribed_time(2.0, 1.0), 1.0, 0.5), 4.0);
}

TEST(Law, RateVanishesAtZero) {
  for (const auto& law : sample_laws()) EXPECT_EQ(sigma_eval(law, 0.0, 0.25), 0.0) << to_string(law.kind());
}

TEST(Law, RateIsPositiveAndIncreasingInV) {
  for (const auto& law : sample_laws()) {
    double prev = 0.0;
    for (double v = 1e-8; v < 1e4; v *= 3.0) {
      const double s = sigma_eval(law, v, 0.25);
      EXPECT_GT(s, prev) << to_string(law.kind()) << " at V=" << v;
      prev = s;
    }
  }
}

TEST(Law, PrescribedTimeRejectsHorizon) {
  const auto law = DecayLaw::prescribed_time(2.0, 1.0);
  for (double t : {1.0, 1.5}) {
    try {
      (void)sigma_eval(law, 1.0, t);
      FAIL() << "expected HorizonExceeded at t=" << t;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::HorizonExceeded);
    }
  }
}

TEST(Law, PrescribedTimeRatioBlowsUp) {
  const auto law = DecayLaw::prescribed_time(2.0, 1.0);
  EXPECT_GT(sigma_eval(law, 1.0, 1.0 - 1e-9) / 1.0, 1e9);
}

TEST(Law, FiniteTimeRatioBlowsUpAsVShrinks) {
  // sigma / V = k V^(gamma - 1)
  const auto law = DecayLaw::finite_time(1.0, 0.5);
  EXPECT_NEAR(sigma_eval(law, 1e-8, 0.0) / 1e-8, 1e4, 1e-6);
}

TEST(Law, SettlingBoundFiniteTime) {
  // V0^(1-gamma) / (k (1-gamma)) with V0 = 1, k = 1, gamma = 0.5.
  EXPECT_DOUBLE_EQ(*settling_bound(DecayLaw::finite_time(1.0, 0.5), 1.0), 2.0);
  EXPECT_DOUBLE_EQ(*settling_bound(DecayLaw::finite_time(2.0, 0.5), 16.0), 4.0);
}

TEST(Law, SettlingBoundFixedTimeIsIndependentOfV0) {
  const auto law = DecayLaw::fixed_time(1.0, 1.0, 0.5, 2.0);
  for (double v0 : {1e-3, 1.0, 1e6}) EXPECT_DOUBLE_EQ(*settling_bound(law, v0), 3.0) << v0;
}

TEST(Law, SettlingBoundPrescribedAndExponential) {
  EXPECT_DOUBLE_EQ(*settling_bound(DecayLaw::prescribed_time(2.0, 5.0), 123.0), 5.0);
  EXPECT_FALSE(settling_bound(DecayLaw::exponential(1.0), 1.0).has_value());
}

TEST(Law, FactoriesRejectInvalidParameters) {
  auto expect_invalid = [](auto make, const char* what) {
    try {
      (void)make();
      ADD_FAILURE() << what << " accepted";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidArgument) << what;
    }
  };
  expect_invalid([] { return DecayLaw::exponential(0.0); }, "exp c=0");
  expect_invalid([] { return DecayLaw::finite_time(1.0, 1.5); }, "ft gamma=1.5");
  expect_invalid([] { return DecayLaw::finite_time(1.0, 0.0); }, "ft gamma=0");
  expect_invalid([] { return DecayLaw::finite_time(-1.0, 0.5); }, "ft k<0");
  expect_invalid([] { return DecayLaw::fixed_time(1.0, 1.0, 0.5, 1.0); }, "fxt delta=1");
  expect_invalid([] { return DecayLaw::fixed_time(1.0, 0.0, 0.5, 2.0); }, "fxt b=0");
  expect_invalid([] { return DecayLaw::prescribed_time(0.0, 1.0); }, "pt mu=0");
  expect_invalid([] { return DecayLaw::prescribed_time(1.0, 0.0); }, "pt T=0");
}

TEST(Law, InvalidParameterMessageNamesInvariant) {
  try {
    (void)DecayLaw::finite_time(1.0, 1.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("gamma in (0,1)"), std::string::npos) << e.what();
  }
}

TEST(Law, NegativeVIsRejected) {
  for (const auto& law : sample_laws()) {
    EXPECT_THROW((void)sigma_eval(law, -1.0, 0.0), Error) << to_string(law.kind());
  }
}
