#include "gsr_arl/exp_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gsr_arl/errors.hpp"

namespace gsr {

namespace {

void require_headstart_domain(double x, const char* what) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw DomainError(std::string(what) + ": x must be a finite value >= 0, got " +
                      std::to_string(x));
  }
}

}  // namespace

ExpShiftModel::ExpShiftModel(double theta)
    : theta_(theta), exponent_(0.0), log1p_theta_(0.0) {
  if (!std::isfinite(theta) || !(theta >= kMinTheta)) {
    throw DomainError("theta must be finite and >= 1e-8, got " + std::to_string(theta));
  }
  exponent_ = (1.0 + theta_) / theta_;
  log1p_theta_ = std::log1p(theta_);
}

double ExpShiftModel::pdf_pre(double x) const noexcept {
  return x >= 0.0 ? std::exp(-x) : 0.0;
}

double ExpShiftModel::pdf_post(double x) const noexcept {
  if (!(x >= 0.0)) return 0.0;
  const double mean = 1.0 + theta_;
  return std::exp(-x / mean) / mean;
}

double ExpShiftModel::log_likelihood_ratio(double x) const {
  if (!(x >= 0.0)) {
    throw DomainError("likelihood_ratio: observation outside support, x = " +
                      std::to_string(x));
  }
  return theta_ * x / (1.0 + theta_) - log1p_theta_;
}

double ExpShiftModel::likelihood_ratio(double x) const {
  return std::exp(log_likelihood_ratio(x));
}

double ExpShiftModel::lr_cdf_pre(double t) const noexcept {
  const double scaled = (1.0 + theta_) * t;
  if (!(scaled >= 1.0)) return 0.0;
  if (std::isinf(scaled)) return 1.0;
  return -std::expm1(-exponent_ * std::log(scaled));
}

double ExpShiftModel::support_edge(double x) const noexcept {
  return (1.0 + x) / (1.0 + theta_);
}

double ExpShiftModel::kernel(double x, double y) const {
  require_headstart_domain(x, "kernel");
  if (!(y > 0.0)) {
    throw DomainError("kernel: y must be > 0, got " + std::to_string(y));
  }
  const double edge = support_edge(x);
  if (y < edge) return 0.0;
  const double value = exponent_ / y * std::exp(exponent_ * std::log(edge / y));
  if (!std::isfinite(value)) {
    throw DomainError("kernel: overflow evaluating K(" + std::to_string(x) + ", " +
                      std::to_string(y) + ")");
  }
  return value;
}

double ExpShiftModel::kernel_tail_integral(double x, double a, double b) const {
  require_headstart_domain(x, "kernel_tail_integral");
  if (!(a > 0.0) || a > b) {
    throw DomainError("kernel_tail_integral: need 0 < a <= b");
  }
  const double edge = support_edge(x);
  const double lo = std::max(a, edge);
  if (b <= lo) return 0.0;
  // Antiderivative of K(x, .) is -(edge / y)^p.
  const double upper = std::isinf(b) ? 0.0 : std::exp(exponent_ * std::log(edge / b));
  const double lower = std::exp(exponent_ * std::log(edge / lo));
  return lower - upper;
}

double ExpShiftModel::kernel_moment_integral(double x, double a, double b) const {
  require_headstart_domain(x, "kernel_moment_integral");
  if (!(a > 0.0) || a > b) {
    throw DomainError("kernel_moment_integral: need 0 < a <= b");
  }
  const double edge = support_edge(x);
  const double lo = std::max(a, edge);
  if (b <= lo) return 0.0;
  // Antiderivative of y K(x, y) is -(1 + theta) edge (edge / y)^(1/theta).
  const double q = 1.0 / theta_;
  const double upper = std::isinf(b) ? 0.0 : std::exp(q * std::log(edge / b));
  const double lower = std::exp(q * std::log(edge / lo));
  return (1.0 + theta_) * edge * (lower - upper);
}

double ExpShiftModel::xi() const noexcept { return 1.0 / (1.0 + theta_); }

double ExpShiftModel::sample_pre(double u) const noexcept { return -std::log1p(-u); }

double ExpShiftModel::sample_post(double u) const noexcept {
  return -(1.0 + theta_) * std::log1p(-u);
}

}  // namespace gsr
