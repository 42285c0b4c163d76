#pragma once

#include <stdexcept>
#include <string>

namespace fluxfsp {

/// Invalid model, configuration or argument supplied by the caller.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure inside a solver (non-convergence, non-finite values).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fluxfsp
