#pragma once

#include <concepts>

namespace gsr {

/// Anything that hands out uniform draws on [0, 1).
template <class T>
concept UniformSource = requires(T& source) {
  { source.uniform() } -> std::convertible_to<double>;
};

/**
 * The E(1)-to-E(1+theta) observation model.
 *
 * Observations are exponential with mean 1 before the change and mean
 * 1 + theta after it. The per-observation likelihood ratio is
 *
 *     Lambda(x) = exp(theta x / (1 + theta)) / (1 + theta),   x >= 0,
 *
 * so Lambda >= 1/(1+theta) almost surely under either measure. Under the
 * pre-change measure the GSR statistic is a Markov chain whose transition
 * density is the power law
 *
 *     K(x, y) = (p / y) (s(x) / y)^p  for y >= s(x),   0 otherwise,
 *
 * with p = (1 + theta)/theta and s(x) = (1 + x)/(1 + theta).
 *
 * Immutable; safe to share across threads.
 */
class ExpShiftModel {
 public:
  /// Shifts below this make 1/theta overflow as an exponent.
  static constexpr double kMinTheta = 1e-8;

  /// Throws DomainError unless theta >= kMinTheta and finite.
  explicit ExpShiftModel(double theta);

  double theta() const noexcept { return theta_; }

  /// Kernel exponent p = (1 + theta) / theta.
  double tail_exponent() const noexcept { return exponent_; }

  double pdf_pre(double x) const noexcept;
  double pdf_post(double x) const noexcept;

  /// Throws DomainError for x < 0.
  double likelihood_ratio(double x) const;
  double log_likelihood_ratio(double x) const;

  /// Pr_inf(Lambda_1 <= t).
  double lr_cdf_pre(double t) const noexcept;

  /// Left edge (1 + x)/(1 + theta) of the kernel support in y.
  double support_edge(double x) const noexcept;

  /// Throws DomainError for x < 0 or y <= 0. At y == support_edge(x) the
  /// right-limit value is returned.
  double kernel(double x, double y) const;

  /// Closed-form integral of kernel(x, .) over [a, b]; b may be +infinity.
  double kernel_tail_integral(double x, double a, double b) const;

  /// Closed-form integral of y * kernel(x, y) over [a, b]; b may be +infinity.
  double kernel_moment_integral(double x, double a, double b) const;

  /// Limiting average exponential overshoot, 1/(1+theta).
  double xi() const noexcept;

  // Inverse-cdf transforms. One uniform per draw, no rejection.
  double sample_pre(double u) const noexcept;
  double sample_post(double u) const noexcept;

  template <UniformSource Source>
  double sample_pre(Source& source) const {
    return sample_pre(static_cast<double>(source.uniform()));
  }

  template <UniformSource Source>
  double sample_post(Source& source) const {
    return sample_post(static_cast<double>(source.uniform()));
  }

  friend bool operator==(const ExpShiftModel&, const ExpShiftModel&) = default;

 private:
  double theta_;
  double exponent_;
  double log1p_theta_;
};

}  // namespace gsr
