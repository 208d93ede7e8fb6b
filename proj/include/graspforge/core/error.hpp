#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace graspforge {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor/vector shapes that do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An operation invoked in the wrong lifecycle state (e.g. backward before forward).
class StateError : public Error {
 public:
  using Error::Error;
};

/// Bad or inconsistent input data (empty meshes, too few shapes, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed file contents. Carries the 1-based line number when one applies.
class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : DataError(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace graspforge
