#pragma once

#include <stdexcept>
#include <string>

namespace fracsys {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Result not representable as a finite double.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// A series could not be summed to the requested accuracy: the term budget
/// ran out or cancellation destroyed more digits than the tolerance allows.
class NonConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The 2x2 system for the integration constants is singular.
class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fracsys
