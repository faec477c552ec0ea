#include "gsr_arl/arl_exact.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gsr_arl/errors.hpp"

namespace gsr {

std::string_view to_string(ArlRoute route) noexcept {
  switch (route) {
    case ArlRoute::exact: return "exact";
    case ArlRoute::approximation: return "approximation";
    case ArlRoute::martingale_bound: return "martingale_bound";
    case ArlRoute::nystrom: return "nystrom";
    case ArlRoute::backward: return "backward";
    case ArlRoute::monte_carlo: return "monte_carlo";
  }
  return "unknown";
}

namespace {

void check_inputs(double x, double threshold) {
  if (!std::isfinite(x) || !(x >= 0.0)) {
    throw DomainError("headstart x must be finite and >= 0");
  }
  if (!std::isfinite(threshold) || !(threshold > 0.0)) {
    throw DomainError("threshold A must be finite and > 0");
  }
}

}  // namespace

ArlResult arl_exact(const ExpShiftModel& model, double x, double threshold) {
  check_inputs(x, threshold);
  const double theta = model.theta();
  const bool high = threshold * theta >= 1.0;
  if (!high && x * theta < 1.0) {
    std::ostringstream msg;
    msg << "no closed form for A = " << threshold << " < 1/theta = " << 1.0 / theta
        << " with headstart x = " << x << " < 1/theta";
    throw RegimeUnsupported(msg.str(),
                            "solve numerically with the `backward` subcommand "
                            "(solve_arl_backward)");
  }
  if (model.support_edge(x) > threshold) return {1.0, ArlRoute::exact, 0.0};
  return {(1.0 + theta) * threshold - x, ArlRoute::exact, 0.0};
}

ArlResult arl_martingale_bound(double x, double threshold) {
  check_inputs(x, threshold);
  return {std::max(1.0, threshold - x), ArlRoute::martingale_bound, 0.0};
}

ArlResult arl_approx(const ExpShiftModel& model, double x, double threshold) {
  check_inputs(x, threshold);
  return {threshold * (1.0 + model.theta()) - x, ArlRoute::approximation, 0.0};
}

double calibrate_threshold(const ExpShiftModel& model, double gamma, double headstart) {
  if (!std::isfinite(gamma) || !(gamma > 1.0)) {
    throw DomainError("target gamma must be finite and > 1");
  }
  if (!std::isfinite(headstart) || !(headstart >= 0.0)) {
    throw DomainError("headstart r must be finite and >= 0");
  }
  const double theta = model.theta();
  const double threshold = (gamma + headstart) / (1.0 + theta);
  if (threshold * theta < 1.0 || model.support_edge(headstart) > threshold) {
    const double gamma_min = 1.0 / theta - headstart;
    const double gamma_attainable = (1.0 + theta) / theta - headstart;
    std::ostringstream msg;
    msg << "target ARL " << gamma << " is in the blind spot of the closed form: it "
        << "never yields ARL below gamma_min = " << gamma_min
        << " (smallest exactly attainable target " << gamma_attainable << ")";
    throw CalibrationOutOfRange(msg.str(), gamma_min, gamma_attainable);
  }
  return threshold;
}

}  // namespace gsr
