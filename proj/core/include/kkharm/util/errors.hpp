#pragma once

#include <stdexcept>
#include <string>

namespace kkharm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a precondition (point off the manifold, mismatched sizes,
/// malformed parameters).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Evaluation requested where the quantity is undefined, e.g. normalizing a
/// field at one of its zeros.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The requested operation has no implementation for this kind of input.
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// B + t C (or A, or B) is not positive at the evaluated t.
class MetricDegeneracy : public Error {
 public:
  using Error::Error;
};

}  // namespace kkharm
