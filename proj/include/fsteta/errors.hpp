#pragma once

#include <stdexcept>
#include <string>

namespace fsteta {

/// Invalid run or object configuration (mesh level, scheme weights, constants).
class ConfigurationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// API misuse: mismatched dimensions, foreign meshes, out-of-order steps.
class UsageError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Iterative solver failed to reach its tolerance.
class SolverError : public std::runtime_error {
public:
  SolverError(const std::string &what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  /// Relative residual of the last iterate.
  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

} // namespace fsteta
