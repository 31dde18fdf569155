#pragma once

#include <stdexcept>
#include <string>

namespace fdrelay {

/// Argument outside the mathematical domain of a function or model.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The two hops of a product distribution have different alpha exponents.
class AlphaMismatchError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// An iterative or adaptive method stopped before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double error_estimate)
      : std::runtime_error(what), error_estimate_(error_estimate) {}

  /// Best error estimate reached before giving up.
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double error_estimate_;
};

}  // namespace fdrelay
