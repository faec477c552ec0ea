#pragma once

#include <stdexcept>
#include <string>

namespace gsr {

/// An argument lies outside the domain of the model or operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Base for errors that depend on where (A, r) sits relative to 1/theta.
/// The CLI maps every RegimeError to exit status 3.
class RegimeError : public std::runtime_error {
 public:
  RegimeError(const std::string& what, std::string hint)
      : std::runtime_error(what), hint_(std::move(hint)) {}

  const std::string& hint() const noexcept { return hint_; }

 private:
  std::string hint_;
};

/// The closed form has no value here (A < 1/theta and x < 1/theta).
class RegimeUnsupported : public RegimeError {
 public:
  using RegimeError::RegimeError;
};

/// A numerical route was asked to work outside the regime it is built for.
class RegimeMismatch : public RegimeError {
 public:
  using RegimeError::RegimeError;
};

/// The requested ARL target lies in the blind spot of the linear formula.
class CalibrationOutOfRange : public RegimeError {
 public:
  CalibrationOutOfRange(const std::string& what, double gamma_min,
                        double gamma_attainable)
      : RegimeError(what, "targets below gamma_min can only be met by a "
                          "threshold A < 1/theta; use the `backward` route"),
        gamma_min_(gamma_min),
        gamma_attainable_(gamma_attainable) {}

  /// Blind-spot floor (1/theta) - r: the linear formula never yields less.
  double gamma_min() const noexcept { return gamma_min_; }
  /// Smallest target met exactly by the formula, i.e. its value at A = 1/theta.
  double gamma_attainable() const noexcept { return gamma_attainable_; }

 private:
  double gamma_min_;
  double gamma_attainable_;
};

/// The discretized renewal equation is singular or too ill-conditioned to trust.
class SolverConditioning : public std::runtime_error {
 public:
  SolverConditioning(const std::string& what, double condition_estimate)
      : std::runtime_error(what), condition_estimate_(condition_estimate) {}

  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double condition_estimate_;
};

}  // namespace gsr
