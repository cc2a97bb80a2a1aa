#pragma once

#include <stdexcept>
#include <string>

namespace gmatch {

// Error categories surfaced through the CLI exit path. The category name is
// what `gmatch` prints as the machine-parsable prefix on failure.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace gmatch
