#pragma once

#include <stdexcept>
#include <string>

namespace pdc {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched row/column/vector dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A matrix required to be symmetric is not, beyond tolerance.
class SymmetryError : public Error {
 public:
  using Error::Error;
};

/// A matrix required to be positive definite has a nonpositive eigenvalue.
class DefinitenessError : public Error {
 public:
  using Error::Error;
};

/// A linear system is singular or too ill-conditioned to solve reliably.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// An iterative scheme exhausted its iteration budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A graph (or Laplacian) is not connected.
class ConnectivityError : public Error {
 public:
  using Error::Error;
};

/// A standing assumption of the analysis is violated by the given data.
/// `assumption()` carries the short tag, e.g. "(A2)".
class AssumptionError : public Error {
 public:
  AssumptionError(std::string tag, const std::string& message)
      : Error(tag + " " + message), tag_(std::move(tag)) {}
  const std::string& assumption() const { return tag_; }

 private:
  std::string tag_;
};

}  // namespace pdc
