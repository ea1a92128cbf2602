#pragma once

#include <stdexcept>
#include <string>

namespace pwstab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Array lengths or grids that do not match.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A wave, system and operator that were built for different problems.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Requested feature does not apply to the given input.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// An iteration failed to reach its tolerance. Carries the last residual.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

/// Newton Jacobian numerically singular (typically near a fold).
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Generic numerical failure (eigensolver, finite-difference step).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// NaN or Inf appeared during time integration.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double last_valid_time)
      : Error(what), last_valid_time_(last_valid_time) {}
  double last_valid_time() const noexcept { return last_valid_time_; }

 private:
  double last_valid_time_;
};

}  // namespace pwstab
