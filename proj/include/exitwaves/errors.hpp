#pragma once

#include <stdexcept>
#include <string>

namespace exitwaves {

// Raised when a scenario, cost specification or argument fails validation.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a numerical procedure cannot produce a consistent answer
// (no bracketed root, non-unique argmax, infeasible chain, ...).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace exitwaves
