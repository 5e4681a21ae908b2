#pragma once

#include <stdexcept>
#include <string>

namespace sahg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape disagreement between operands.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of a function (log of a
// non-positive value, non-positive curvature scale, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid user-facing parameter (k >= N, bad fractions, unknown config key).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Missing or malformed on-disk input.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Non-finite values encountered during optimization.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace sahg
