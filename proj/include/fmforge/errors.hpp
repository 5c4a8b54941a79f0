#pragma once

#include <stdexcept>
#include <string>

namespace fmforge {

// Bad user input: invalid config, schema violation, missing file.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: non-convergence, unstable trap, degenerate calibration.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fmforge
