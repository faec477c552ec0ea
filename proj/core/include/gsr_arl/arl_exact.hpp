#pragma once

#include <string_view>

#include "gsr_arl/exp_model.hpp"

namespace gsr {

enum class ArlRoute { exact, approximation, martingale_bound, nystrom, backward, monte_carlo };

std::string_view to_string(ArlRoute route) noexcept;

/// An ARL-to-false-alarm value and how it was obtained.
///
/// diagnostic is 0 for closed forms, the residual sup-norm for solver routes
/// and the confidence half-width for Monte Carlo. martingale_bound values are
/// lower bounds, not estimates.
struct ArlResult {
  double value = 1.0;
  ArlRoute route = ArlRoute::exact;
  double diagnostic = 0.0;
};

/**
 * Exact ARL to false alarm, starting from headstart x, for A >= 1/theta:
 *
 *     l(x, A) = 1 + (1 + theta) (A - (1 + x)/(1 + theta))   if (1 + x)/(1 + theta) <= A,
 *     l(x, A) = 1                                          otherwise.
 *
 * The first branch is evaluated in its reduced form (1 + theta) A - x.
 * For A < 1/theta only x >= 1/theta is served (the statistic then crosses
 * on the first step with probability one); anything else throws
 * RegimeUnsupported.
 */
ArlResult arl_exact(const ExpShiftModel& model, double x, double threshold);

/// max(1, A - x): the optional-stopping lower bound.
ArlResult arl_martingale_bound(double x, double threshold);

/// A / xi - x = A (1 + theta) - x.
ArlResult arl_approx(const ExpShiftModel& model, double x, double threshold);

/// Threshold A = (gamma + r)/(1 + theta) at which arl_exact(r, A) == gamma.
/// Throws CalibrationOutOfRange when that A falls below 1/theta, and
/// DomainError for gamma <= 1 or r < 0.
double calibrate_threshold(const ExpShiftModel& model, double gamma, double headstart);

}  // namespace gsr
