#pragma once
#include <stdexcept>
#include <string>

namespace bellmux {

/// Usage or configuration problem; CLI exit code 1.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

/// Malformed or missing input data; CLI exit code 2.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& m) : std::runtime_error(m) {}
};

/// Numerical failure (non-converged fit, singular system); CLI exit code 3.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace bellmux
