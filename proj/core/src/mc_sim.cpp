#include "gsr_arl/mc_sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "gsr_arl/errors.hpp"
#include "gsr_arl/random.hpp"

namespace gsr {

namespace {

constexpr double kTruncationBudget = 0.001;

void validate(const McConfig& mc) {
  if (mc.replications < 100) {
    throw DomainError("Monte Carlo needs at least 100 replications for an interval estimate");
  }
  if (!(mc.confidence_level > 0.0 && mc.confidence_level < 1.0)) {
    throw DomainError("confidence_level must lie in (0, 1)");
  }
  if (mc.step_cap && *mc.step_cap == 0) throw DomainError("step_cap must be >= 1");
}

unsigned worker_count(const McConfig& mc) {
  unsigned n = mc.threads != 0 ? mc.threads : std::thread::hardware_concurrency();
  n = std::max(1u, n);
  return static_cast<unsigned>(std::min<std::size_t>(n, mc.replications));
}

struct Sample {
  double value = 0.0;
  bool truncated = false;
};

// Runs body(i) for every replication index and stores the result at slot i.
// The reduction afterwards is sequential in index order, so the summary is
// the same for any thread count.
template <class Body>
std::vector<Sample> run_replications(const McConfig& mc, Body body) {
  std::vector<Sample> samples(mc.replications);
  const unsigned workers = worker_count(mc);
  if (workers == 1) {
    for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = body(i);
    return samples;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (samples.size() + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(samples.size(), begin + chunk);
    pool.emplace_back([&samples, &body, begin, end] {
      for (std::size_t i = begin; i < end; ++i) samples[i] = body(i);
    });
  }
  pool.clear();  // joins
  return samples;
}

McEstimate summarize(const std::vector<Sample>& samples, double confidence) {
  McEstimate est;
  est.replications_used = samples.size();
  // Neumaier-compensated sums in index order.
  double sum = 0.0;
  double comp = 0.0;
  for (const Sample& s : samples) {
    const double t = sum + s.value;
    comp += std::abs(sum) >= std::abs(s.value) ? (sum - t) + s.value : (s.value - t) + sum;
    sum = t;
    if (s.truncated) ++est.truncated_count;
  }
  const double n = static_cast<double>(samples.size());
  est.mean = (sum + comp) / n;
  double ss = 0.0;
  comp = 0.0;
  for (const Sample& s : samples) {
    const double d = (s.value - est.mean) * (s.value - est.mean);
    const double t = ss + d;
    comp += ss >= d ? (ss - t) + d : (d - t) + ss;
    ss = t;
  }
  const double variance = samples.size() > 1 ? (ss + comp) / (n - 1.0) : 0.0;
  est.standard_error = std::sqrt(variance / n);
  const boost::math::normal standard;
  const double z = boost::math::quantile(standard, 0.5 + 0.5 * confidence);
  est.half_width = z * est.standard_error;
  return est;
}

McEstimate checked(McEstimate est, const char* what) {
  if (static_cast<double>(est.truncated_count) >
      kTruncationBudget * static_cast<double>(est.replications_used)) {
    std::ostringstream msg;
    msg << what << ": " << est.truncated_count << " of " << est.replications_used
        << " replications hit the step cap; the mean is biased low";
    throw UnreliableEstimate(msg.str(), est);
  }
  return est;
}

}  // namespace

std::size_t default_arl_step_cap(const ExpShiftModel& model, const GsrConfig& config) {
  const double approx = config.threshold() * (1.0 + model.theta()) - config.headstart();
  return static_cast<std::size_t>(std::ceil(100.0 * std::max(approx, 10.0)));
}

McEstimate estimate_arl(const ExpShiftModel& model, const GsrConfig& config,
                        const McConfig& mc) {
  validate(mc);
  const std::size_t cap = mc.step_cap.value_or(default_arl_step_cap(model, config));
  const double threshold = config.threshold();
  const auto samples = run_replications(mc, [&](std::size_t i) {
    CounterStream stream(mc.seed, i);
    double stat = config.headstart();
    for (std::size_t n = 1; n <= cap; ++n) {
      stat = step(stat, model.likelihood_ratio(model.sample_pre(stream)));
      if (stat >= threshold) return Sample{static_cast<double>(n), false};
    }
    return Sample{static_cast<double>(cap), true};
  });
  return checked(summarize(samples, mc.confidence_level), "estimate_arl");
}

McEstimate verify_martingale(const ExpShiftModel& model, double headstart, std::size_t steps,
                             const McConfig& mc) {
  validate(mc);
  if (!std::isfinite(headstart) || !(headstart >= 0.0)) {
    throw DomainError("headstart r must be finite and >= 0");
  }
  if (steps == 0) {
    McEstimate zero;
    zero.replications_used = mc.replications;
    return zero;
  }
  const auto samples = run_replications(mc, [&](std::size_t i) {
    CounterStream stream(mc.seed, i);
    double stat = headstart;
    for (std::size_t n = 1; n <= steps; ++n) {
      stat = step(stat, model.likelihood_ratio(model.sample_pre(stream)));
    }
    return Sample{(stat - headstart) - static_cast<double>(steps), false};
  });
  return summarize(samples, mc.confidence_level);
}

McEstimate estimate_xi(const ExpShiftModel& model, double level_a, const McConfig& mc) {
  validate(mc);
  if (!std::isfinite(level_a) || !(level_a > 0.0)) {
    throw DomainError("level a must be finite and > 0");
  }
  const double drift = model.theta() - std::log1p(model.theta());
  const std::size_t cap = mc.step_cap.value_or(
      static_cast<std::size_t>(std::ceil(100.0 * (level_a / drift + 10.0))));
  const auto samples = run_replications(mc, [&](std::size_t i) {
    CounterStream stream(mc.seed, i);
    double walk = 0.0;
    for (std::size_t n = 1; n <= cap; ++n) {
      walk += model.log_likelihood_ratio(model.sample_post(stream));
      if (walk >= level_a) return Sample{std::exp(-(walk - level_a)), false};
    }
    return Sample{0.0, true};
  });
  return checked(summarize(samples, mc.confidence_level), "estimate_xi");
}

}  // namespace gsr
