#pragma once

#include <stdexcept>
#include <string>

namespace qbounce {

/// Input outside the mathematical domain of an operation (non-finite x, z < 0, T < 0 ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Argument inside the domain but outside the documented support window.
class UnsupportedRange : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Violated caller contract (dimension mismatch, bad index).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative method failed to reach its target.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, int index = -1, double estimate = 0.0)
      : std::runtime_error(what), index_(index), estimate_(estimate) {}

  /// Level / zero index the failure refers to, -1 if not applicable.
  int index() const noexcept { return index_; }
  /// Best error estimate reached before giving up.
  double estimate() const noexcept { return estimate_; }

 private:
  int index_;
  double estimate_;
};

/// Configuration rejected before any computation. `field()` is the dotted key path.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace qbounce
