#include "gsr_arl/gsr_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gsr_arl/errors.hpp"

namespace gsr {

GsrConfig::GsrConfig(double threshold, double headstart)
    : threshold_(threshold), headstart_(headstart) {
  if (!std::isfinite(threshold) || !(threshold > 0.0)) {
    throw DomainError("threshold A must be finite and > 0, got " + std::to_string(threshold));
  }
  if (!std::isfinite(headstart) || !(headstart >= 0.0)) {
    throw DomainError("headstart r must be finite and >= 0, got " + std::to_string(headstart));
  }
}

Trajectory run_detection(const ExpShiftModel& model, const GsrConfig& config,
                         std::span<const double> observations, std::size_t cap,
                         PathRecording recording) {
  if (observations.empty()) throw DomainError("run_detection: no observations");
  if (cap == 0) throw DomainError("run_detection: cap must be >= 1");
  for (std::size_t i = 0; i < observations.size(); ++i) {
    if (!(observations[i] >= 0.0) || !std::isfinite(observations[i])) {
      throw DomainError("run_detection: observation " + std::to_string(i + 1) +
                        " is outside the support [0, inf): " +
                        std::to_string(observations[i]));
    }
  }

  std::size_t next_index = 0;
  const std::size_t limit = std::min(cap, observations.size());
  Trajectory path = run_detection_stream(
      model, config, [&] { return observations[next_index++]; }, limit, recording);
  path.cap = cap;
  if (!path.stopped()) {
    path.outcome =
        limit == observations.size() ? RunOutcome::data_exhausted : RunOutcome::cap_reached;
  }
  return path;
}

double lower_bound(const ExpShiftModel& model, double headstart, std::size_t n) {
  const double theta = model.theta();
  // (1 + theta)^-n, and 1 - (1 + theta)^-n without cancellation.
  const double log_decay = -static_cast<double>(n) * std::log1p(theta);
  const double decay = std::exp(log_decay);
  return -std::expm1(log_decay) / theta + headstart * decay;
}

namespace {

bool is_high_threshold(const ExpShiftModel& model, double threshold) {
  return threshold * model.theta() >= 1.0;
}

}  // namespace

std::optional<std::size_t> max_steps(const ExpShiftModel& model, double headstart,
                                     double threshold) {
  if (lower_bound(model, headstart, 1) >= threshold) return 1;
  if (is_high_threshold(model, threshold)) return std::nullopt;

  const double theta = model.theta();
  const double steps =
      std::log((1.0 - theta * headstart) / (1.0 - theta * threshold)) / std::log1p(theta);
  const double nearest = std::round(steps);
  double count = std::ceil(steps);
  if (std::abs(steps - nearest) <= 1e-12 * std::max(1.0, std::abs(steps))) count = nearest;
  return static_cast<std::size_t>(std::max(1.0, count));
}

RegimeInfo regime(const ExpShiftModel& model, const GsrConfig& config) {
  return RegimeInfo{
      .high_threshold = is_high_threshold(model, config.threshold()),
      .deterministic_cap = max_steps(model, config.headstart(), config.threshold()),
  };
}

}  // namespace gsr
