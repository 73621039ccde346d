#pragma once

#include <stdexcept>
#include <string>

namespace nrmt {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

class DomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "domain"; }
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "unsupported"; }
};

/// Iterative or adaptive procedure ran out of budget. Carries the best
/// estimate reached before giving up.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, double best, double err)
      : Error(what), best_estimate(best), error_estimate(err) {}
  const char* kind() const noexcept override { return "non-convergence"; }
  double best_estimate;
  double error_estimate;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "divergence"; }
};

class NonNormalizableError : public DivergenceError {
 public:
  using DivergenceError::DivergenceError;
  const char* kind() const noexcept override { return "non-normalizable"; }
};

/// A fixed-trace density is a measure; it has no pointwise value.
class PointMassError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "point-mass"; }
};

class UnavailableError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "unavailable"; }
};

class DegenerateFieldError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "degenerate-field"; }
};

/// A superspace integrand that does not vanish at infinity leaves a
/// boundary term at infinity in the radial integral.
class BoundaryTermError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "boundary-term"; }
};

class NumericError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "numeric"; }
};

}  // namespace nrmt
