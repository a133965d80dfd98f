#pragma once

#include <stdexcept>
#include <string>

namespace biphoton {

/// Invalid user-supplied configuration (bad parameters, malformed masks, ...).
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Geometric request outside what a grid or region can provide.
class RangeError : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

/// Operation that is not defined for the given object (e.g. amplitude of a mixed state).
class UnsupportedError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Input file could not be parsed. The message names the location.
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Internal failure that should not happen for valid inputs.
class InternalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace biphoton
