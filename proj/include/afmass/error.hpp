#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace afmass {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of an operation (r below r_min, p outside (1,3), ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of a geometric statement does not hold
/// (non-minimal boundary, non-outward-minimizing start, metric with boundary, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Syntax error inside a radial expression. `position` is the 0-based offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Expression evaluated outside its domain (log of a nonpositive value, ...).
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& message, double r)
      : Error(message + " (r = " + std::to_string(r) + ")"), r_(r) {}
  double r() const noexcept { return r_; }

 private:
  double r_;
};

/// An iterative kernel failed to reach its tolerance. The best estimate is kept.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, double estimate, double error_bound)
      : Error(message), estimate_(estimate), error_bound_(error_bound) {}
  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

/// An improper integral appears to diverge.
class DivergenceError : public ConvergenceError {
 public:
  using ConvergenceError::ConvergenceError;
};

}  // namespace afmass
