#pragma once

#include <stdexcept>
#include <string>

namespace histdirac {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain (m <= 0, v >= 1, z <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Requested accuracy not reached. Carries the best estimate obtained.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double best_estimate, double error_estimate)
      : Error(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double best_estimate_;
  double error_estimate_;
};

/// A grid cannot represent the requested object (Nyquist, support, h too large).
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Evaluation at a singular point (on the light cone with zero regulator).
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Lorentz generator whose index-lowered form is not antisymmetric.
class InvalidGeneratorError : public Error {
 public:
  using Error::Error;
};

/// Eigenvalue tracking across a mass step became ambiguous.
class TrackingError : public Error {
 public:
  using Error::Error;
};

/// Eigensolver failure (LAPACK info != 0 or residual contract violated).
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Broken internal invariant.
class InternalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace histdirac
