#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "gsr_arl/arl_exact.hpp"
#include "gsr_arl/errors.hpp"

namespace {

using namespace gsr;

double exact(double theta, double x, double a) {
  return arl_exact(ExpShiftModel(theta), x, a).value;
}

TEST(ArlExact, Examples) {
  EXPECT_EQ(exact(1.0, 0.0, 100.0), 200.0);
  EXPECT_EQ(exact(1.0, 10.0, 2.0), 1.0);
  EXPECT_NEAR(exact(0.5, 3.0, 40.0), 57.0, 1e-12);
  const ArlResult r = arl_exact(ExpShiftModel(1.0), 0.0, 100.0);
  EXPECT_EQ(r.route, ArlRoute::exact);
  EXPECT_EQ(r.diagnostic, 0.0);
}

TEST(ArlExact, LowRegimeOnlyAboveOneOverTheta) {
  const ExpShiftModel model(1.0);
  EXPECT_EQ(arl_exact(model, 1.5, 0.75).value, 1.0);
  EXPECT_EQ(arl_exact(model, 1.0, 0.75).value, 1.0);
  try {
    (void)arl_exact(model, 0.0, 0.75);
    FAIL() << "expected RegimeUnsupported";
  } catch (const RegimeUnsupported& e) {
    EXPECT_NE(e.hint().find("backward"), std::string::npos);
  }
  EXPECT_THROW((void)arl_exact(ExpShiftModel(0.01), 0.0, 50.0), RegimeError);
  EXPECT_THROW((void)arl_exact(model, -1.0, 5.0), DomainError);
  EXPECT_THROW((void)arl_exact(model, 0.0, 0.0), DomainError);
}

TEST(ArlBound, Examples) {
  EXPECT_EQ(arl_martingale_bound(0.0, 100.0).value, 100.0);
  EXPECT_EQ(arl_martingale_bound(10.0, 5.0).value, 1.0);
  EXPECT_EQ(arl_martingale_bound(20.0, 100.0).value, 80.0);
  EXPECT_EQ(arl_martingale_bound(0.0, 1.0).route, ArlRoute::martingale_bound);
}

TEST(ArlApprox, Examples) {
  const ExpShiftModel one(1.0);
  EXPECT_EQ(arl_approx(one, 0.0, 100.0).value, 200.0);
  EXPECT_EQ(arl_approx(one, 0.0, 100.0).value, arl_exact(one, 0.0, 100.0).value);
  EXPECT_EQ(arl_approx(ExpShiftModel(2.0), 4.0, 10.0).value, 26.0);
  EXPECT_EQ(arl_approx(one, 0.0, 1.0).route, ArlRoute::approximation);
}

// Right-hand side of the renewal equation for the linear candidate
// l(y) = (1+theta)A - y, integrated in closed form.
double renewal_rhs(const ExpShiftModel& model, double x, double a) {
  const double lo = model.support_edge(x);
  if (lo >= a) return 1.0;
  const double c = (1.0 + model.theta()) * a;
  return 1.0 + c * model.kernel_tail_integral(x, lo, a) - model.kernel_moment_integral(x, lo, a);
}

TEST(ArlExact, SatisfiesRenewalEquation) {
  for (double theta : {0.5, 1.0, 2.0}) {
    const ExpShiftModel model(theta);
    for (double a : {1.0 / theta, 2.0 / theta, 7.3, 40.0, 250.0}) {
      if (a * theta < 1.0) continue;
      for (double frac : {0.0, 0.1, 0.5, 1.0, 1.7, 3.0}) {
        const double x = frac * a;
        const double residual = std::abs(exact(theta, x, a) - renewal_rhs(model, x, a));
        EXPECT_LE(residual, 1e-10 * std::max(1.0, exact(theta, x, a)))
            << "theta=" << theta << " A=" << a << " x=" << x;
      }
    }
  }
}

TEST(ArlExact, EqualsApproximationOnSupport) {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> theta_dist(0.05, 5.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 10'000; ++i) {
    const double theta = theta_dist(rng);
    const ExpShiftModel model(theta);
    const double a = (1.0 + 100.0 * unit(rng)) / theta;
    const double x = unit(rng) * ((1.0 + theta) * a - 1.0);
    ASSERT_EQ(arl_exact(model, x, a).value, arl_approx(model, x, a).value);
  }
}

TEST(ArlExact, DominatesMartingaleBound) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double theta = 0.1 + 3.0 * unit(rng);
    const double a = (1.0 + 20.0 * unit(rng)) / theta;
    const double x = 3.0 * a * unit(rng);
    EXPECT_GE(exact(theta, x, a), arl_martingale_bound(x, a).value);
  }
}

TEST(ArlExact, Slopes) {
  const double theta = 0.5;
  const double a = 10.0;
  EXPECT_NEAR(exact(theta, 1.0, a + 1.0) - exact(theta, 1.0, a), 1.0 + theta, 1e-12);
  EXPECT_NEAR(exact(theta, 2.0, a) - exact(theta, 1.0, a), -1.0, 1e-12);
  EXPECT_LT(exact(theta, 1.0, a), exact(theta, 1.0, a * 1.001));
  EXPECT_GT(exact(theta, 1.0, a), exact(theta, 1.01, a));
}

TEST(Calibrate, Examples) {
  const ExpShiftModel one(1.0);
  EXPECT_EQ(calibrate_threshold(one, 200.0, 0.0), 100.0);
  EXPECT_EQ(calibrate_threshold(one, 1000.0, 10.0), 505.0);
  EXPECT_EQ(arl_exact(one, 10.0, 505.0).value, 1000.0);
}

TEST(Calibrate, BlindSpot) {
  try {
    (void)calibrate_threshold(ExpShiftModel(0.01), 50.0, 0.0);
    FAIL() << "expected CalibrationOutOfRange";
  } catch (const CalibrationOutOfRange& e) {
    EXPECT_NEAR(e.gamma_min(), 100.0, 1e-9);
    EXPECT_NEAR(e.gamma_attainable(), 101.0, 1e-9);
    EXPECT_NE(e.hint().find("backward"), std::string::npos);
  }
  EXPECT_THROW((void)calibrate_threshold(ExpShiftModel(1.0), 1.5, 0.0), RegimeError);
}

TEST(Calibrate, RejectsBadTargets) {
  const ExpShiftModel one(1.0);
  EXPECT_THROW((void)calibrate_threshold(one, 1.0, 0.0), DomainError);
  EXPECT_THROW((void)calibrate_threshold(one, 500.0, -1.0), DomainError);
  EXPECT_THROW((void)calibrate_threshold(one, std::nan(""), 0.0), DomainError);
}

TEST(Calibrate, RoundTrip) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int checked = 0;
  for (int i = 0; i < 5000; ++i) {
    const double theta = 0.02 + 4.0 * unit(rng);
    const ExpShiftModel model(theta);
    const double r = 20.0 * unit(rng);
    const double gamma = 1.0 + 5000.0 * unit(rng);
    double a = 0.0;
    try {
      a = calibrate_threshold(model, gamma, r);
    } catch (const CalibrationOutOfRange&) {
      continue;
    }
    ++checked;
    EXPECT_NEAR(arl_exact(model, r, a).value, gamma, 1e-12 * gamma);
  }
  EXPECT_GT(checked, 1000);
}

TEST(ArlRoute, Names) {
  EXPECT_EQ(to_string(ArlRoute::exact), "exact");
  EXPECT_EQ(to_string(ArlRoute::nystrom), "nystrom");
  EXPECT_EQ(to_string(ArlRoute::backward), "backward");
  EXPECT_EQ(to_string(ArlRoute::monte_carlo), "monte_carlo");
}

}  // namespace
