#pragma once

#include <stdexcept>
#include <string>

namespace dispersim {

// Invalid parameter record (negative bandwidth, bad grid, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Valid parameters, but the requested form is undefined there (e.g. the
// pointwise joint spectrum at sigma_c = 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Closed forms only cover purely quadratic sample phase.
class UnsupportedModelError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A quadrature inside an oracle failed to converge.
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dispersim
