#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gsr_arl/exp_model.hpp"

namespace gsr {

/// Detection threshold A > 0 and headstart r >= 0.
class GsrConfig {
 public:
  /// Throws DomainError when A <= 0, r < 0, or either is not finite.
  GsrConfig(double threshold, double headstart);

  double threshold() const noexcept { return threshold_; }
  double headstart() const noexcept { return headstart_; }

 private:
  double threshold_;
  double headstart_;
};

enum class RunOutcome {
  alarm,           // R_n >= A at stopping_time
  data_exhausted,  // every observation consumed without an alarm
  cap_reached,     // cap steps taken without an alarm
};

enum class PathRecording { full, stopping_time_only };

struct Trajectory {
  // R_0 = r, R_1, ..., R_N. Holds only R_0 and R_N when recording was off.
  std::vector<double> statistic_values;
  std::optional<std::size_t> stopping_time;
  std::size_t steps_taken = 0;
  std::size_t cap = 0;
  RunOutcome outcome = RunOutcome::cap_reached;

  bool stopped() const noexcept { return stopping_time.has_value(); }
};

/// Where A sits relative to 1/theta, and the deterministic step cap if any.
struct RegimeInfo {
  bool high_threshold = false;
  std::optional<std::size_t> deterministic_cap;
};

/// One GSR update, (1 + current) * lr_value.
constexpr double step(double current, double lr_value) noexcept {
  return (1.0 + current) * lr_value;
}

/// Runs the GSR stopping rule over recorded data. Stops at the first n >= 1
/// with R_n >= A. Throws DomainError naming the index of a negative
/// observation, or when observations is empty or cap is 0.
Trajectory run_detection(const ExpShiftModel& model, const GsrConfig& config,
                         std::span<const double> observations, std::size_t cap,
                         PathRecording recording = PathRecording::full);

/// Same rule over a generator of observations; next() is called at most cap times.
template <class Next>
Trajectory run_detection_stream(const ExpShiftModel& model, const GsrConfig& config,
                                Next&& next, std::size_t cap,
                                PathRecording recording = PathRecording::full) {
  Trajectory path;
  path.cap = cap;
  double current = config.headstart();
  path.statistic_values.push_back(current);
  for (std::size_t n = 1; n <= cap; ++n) {
    current = step(current, model.likelihood_ratio(next()));
    path.steps_taken = n;
    if (recording == PathRecording::full) path.statistic_values.push_back(current);
    if (current >= config.threshold()) {
      path.stopping_time = n;
      path.outcome = RunOutcome::alarm;
      break;
    }
  }
  if (recording == PathRecording::stopping_time_only && path.steps_taken > 0) {
    path.statistic_values.push_back(current);
  }
  return path;
}

/// Deterministic lower bound B_n^r on R_n^r, attained by all-zero data.
double lower_bound(const ExpShiftModel& model, double headstart, std::size_t n);

/**
 * Number of steps within which the statistic is certain to reach A, or
 * nullopt when no such bound exists.
 *
 * For r < A < 1/theta this is ceil(log((1 - theta r)/(1 - theta A)) / log(1 + theta)).
 * When the first step alone is guaranteed to cross (B_1 >= A) it is 1. An
 * exact integer ceiling argument counts as reaching the level, and values
 * within 1e-12 relative of an integer snap to it.
 */
std::optional<std::size_t> max_steps(const ExpShiftModel& model, double headstart,
                                     double threshold);

/// A == 1/theta counts as the high-threshold regime.
RegimeInfo regime(const ExpShiftModel& model, const GsrConfig& config);

}  // namespace gsr
