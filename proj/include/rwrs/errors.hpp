#pragma once

#include <stdexcept>
#include <string>

namespace rwrs {

// Invalid model parameter (alpha outside (0,2], negative laziness, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside an operation's domain (n = 0, set outside E, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Operation requested in the wrong stability regime.
class RegimeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Block scheme inconsistent with the data (l_n >= r_n, k >= r_n).
class SchemeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// m(n) rounds to zero.
class DegenerateScaleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Request would exceed the configured memory/work limits.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rwrs
