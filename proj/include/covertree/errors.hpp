#pragma once

#include <stdexcept>
#include <string>

namespace covertree {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Memory or size budget exceeded (tree too deep to materialize, etc).
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A step or excursion cap was hit before the stopping condition.
class CapExceededError : public ResourceError {
 public:
  using ResourceError::ResourceError;
};

/// A 64-bit count would overflow.
class ArithmeticError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Not enough data to produce a trustworthy estimate.
class AccuracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data is degenerate or malformed.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rows being written collide with rows already on disk.
class ConflictError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace covertree
