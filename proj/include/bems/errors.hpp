#pragma once

#include <stdexcept>
#include <string>

namespace bems {

// Malformed or inconsistent input data (schema, gaps, negative values).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Not enough history to build an envelope or statistics.
class InsufficientHistory : public DataError {
 public:
  using DataError::DataError;
};

class ShapeMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The MILP hit its node limit without an incumbent, or a model that must be
// feasible by construction was not.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bems
