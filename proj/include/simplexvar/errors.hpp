#pragma once

#include <stdexcept>
#include <string>

namespace simplexvar {

// Count or coordinate arithmetic would leave its integer type.
class CapacityError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

// Caller violated a precondition (dimension mismatch, bad parameter).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The requested dilation admits no isometric copies.
class EmptyCopySet : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace simplexvar
