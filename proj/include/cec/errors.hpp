#pragma once

#include <stdexcept>
#include <string>

namespace cec {

/// Input outside the mathematical domain of an operation (e.g. u <= 0 for a
/// generator, alpha == 0 for the Clayton family).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative method hit its iteration cap without meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two inputs that must agree in length (or column count) do not.
class SizeMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A parameter regime the model deliberately does not handle (e.g. theta <= 0
/// for the anticomonotone hedge).
class UnsupportedRegime : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace cec
