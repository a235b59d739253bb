#pragma once

#include <stdexcept>
#include <string>

namespace addcomb {

// Bad arguments: negative values, empty sets where forbidden, eps outside (0,1], ...
struct invalid_parameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A count or a 128-bit intermediate does not fit.
struct arithmetic_overflow : std::overflow_error {
  using std::overflow_error::overflow_error;
};

// Brute-force oracles and exhaustive searches refuse inputs above their budget.
struct budget_exceeded : std::length_error {
  using std::length_error::length_error;
};

// A documented precondition of the algorithm is clearly violated by the input.
struct precondition_failed : std::domain_error {
  using std::domain_error::domain_error;
};

// A deterministic search (prime window, hash family, Schoen shifts) ran dry.
struct search_exhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Something the analysis promises did not happen. Always a bug or a constant
// that is too tight for the input size.
struct internal_error : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace addcomb
