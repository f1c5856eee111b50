#pragma once

#include <stdexcept>
#include <string>

namespace cgs {

struct ConfigurationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct RangeError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

// Numeric result could not be certified to the requested tolerance.
struct PrecisionError : std::runtime_error {
  PrecisionError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_bound(achieved) {}
  double achieved_bound;
};

// An internal invariant failed; indicates a bug, not bad input.
struct ConsistencyError : std::logic_error {
  using std::logic_error::logic_error;
};

struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OverflowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cgs
