#pragma once

#include <stdexcept>
#include <string>

namespace qcoef {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller violated an operation's precondition (bad arguments, bad system).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A system description failed validation at construction time.
class ValidationError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Requested a map index beyond a finite family.
class IndexOutOfFamilyError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// A series was evaluated at or beyond its convergence abscissa.
class DivergenceError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// An exact solver was handed an instance above its hard size cap.
class InstanceTooLargeError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Not enough usable data points to fit or report anything.
class InsufficientDataError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// An iterative method ran out of iterations or terms before reaching its
/// tolerance.
class BudgetError : public Error {
 public:
  using Error::Error;
};

}  // namespace qcoef
