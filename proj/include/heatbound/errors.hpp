#pragma once

#include <stdexcept>

namespace heatbound {

// Mathematically invalid input: nonpositive time, negative radius, delta
// outside its range, and similar.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed request: unknown manifold spec, mismatched point shapes,
// bad grid syntax, unknown suite name.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The requested accuracy cannot be delivered: series cancellation past the
// reliability cap, evaluation below the small-time floor, unconverged sums.
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace heatbound
