#pragma once

#include <stdexcept>
#include <string>

namespace gso {

// Bad parameters, dimension mismatches, invalid configuration. CLI exit 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Breakdown inside a numeric routine (non-convergence, NaN, rank loss). CLI exit 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// File and parse failures. CLI exit 4.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gso
