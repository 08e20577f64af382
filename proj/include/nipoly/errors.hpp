#pragma once

#include <stdexcept>
#include <string>

namespace nipoly {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Endpoint configuration admits no (k-)path.
class NoPathError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Enumeration or work cap exceeded; never truncated silently.
class CapExceededError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// A log-space computation lost too many significant digits to be trusted.
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative numerics failed to converge.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nipoly
