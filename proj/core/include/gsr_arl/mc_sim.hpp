#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "gsr_arl/exp_model.hpp"
#include "gsr_arl/gsr_core.hpp"

namespace gsr {

struct McConfig {
  std::size_t replications = 10'000;  // at least 100
  std::uint64_t seed = 0;
  std::optional<std::size_t> step_cap;  // per replication; operation-specific default
  double confidence_level = 0.99;
  unsigned threads = 0;  // 0: std::thread::hardware_concurrency()
};

struct McEstimate {
  double mean = 0.0;
  double half_width = 0.0;      // CLT half-width at confidence_level
  double standard_error = 0.0;  // sample sd / sqrt(n)
  std::size_t replications_used = 0;
  std::size_t truncated_count = 0;  // replications stopped by step_cap
};

/// More than 0.1% of replications hit the step cap; partial() holds what ran.
class UnreliableEstimate : public std::runtime_error {
 public:
  UnreliableEstimate(const std::string& what, McEstimate partial)
      : std::runtime_error(what), partial_(partial) {}

  const McEstimate& partial() const noexcept { return partial_; }

 private:
  McEstimate partial_;
};

/// 100 * max(A(1+theta) - r, 10).
std::size_t default_arl_step_cap(const ExpShiftModel& model, const GsrConfig& config);

/// Mean stopping time over pre-change replications. Replication i draws from
/// CounterStream(seed, i); results do not depend on the thread count.
McEstimate estimate_arl(const ExpShiftModel& model, const GsrConfig& config, const McConfig& mc);

/// Mean of R_n - n - r over pre-change paths (zero in expectation).
McEstimate verify_martingale(const ExpShiftModel& model, double headstart, std::size_t steps,
                             const McConfig& mc);

/// Mean of exp(-overshoot) of the post-change log-likelihood walk at its
/// first passage over level_a. Default step cap 100 * (a / drift + 10).
McEstimate estimate_xi(const ExpShiftModel& model, double level_a, const McConfig& mc);

}  // namespace gsr
