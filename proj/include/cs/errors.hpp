#pragma once

#include <stdexcept>
#include <string>

namespace cs {

// Base for every failure raised by a computation (CLI exit code 1).
struct ComputationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed user input such as seed files or vectors (CLI exit code 2).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A substitution produced a denominator that does not clear.
struct NonLaurentError : ComputationError {
  using ComputationError::ComputationError;
};

// A base point or path touches a wall or joint it should avoid.
struct NonGenericError : ComputationError {
  using ComputationError::ComputationError;
};

// Input lies outside the configurations the algorithms handle.
struct UnsupportedError : ComputationError {
  using ComputationError::ComputationError;
};

}  // namespace cs
