#pragma once

#include <stdexcept>
#include <string>

namespace laser {

// Malformed or inconsistent input data (CLI exit code 2).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid options or configuration (CLI exit code 3).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerically degenerate input, e.g. a zero-norm vector or a rank-0 matrix.
class DegenerateInput : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace laser
