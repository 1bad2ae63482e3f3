#pragma once

#include <stdexcept>
#include <string>

namespace relayee {

/// Base class for all model/numeric failures raised by the library.
class ModelError : public std::runtime_error {
 public:
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid parameter or malformed input (bad fading shape, nonpositive rate, ...).
class InvalidParameterError : public ModelError {
 public:
  explicit InvalidParameterError(const std::string& what) : ModelError(what) {}
};

/// Quadrature/solver did not reach the requested tolerance.
class NumericError : public ModelError {
 public:
  NumericError(const std::string& what, double residual)
      : ModelError(what + " (achieved residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_ = 0.0;
};

/// Configuration file problems: parse errors and violated invariants.
class ConfigError : public ModelError {
 public:
  explicit ConfigError(const std::string& what) : ModelError(what) {}
};

/// A delay budget (or other constraint set) that cannot be met.
class InfeasibleError : public ModelError {
 public:
  InfeasibleError(const std::string& what, double best_achievable)
      : ModelError(what), best_achievable_(best_achievable) {}
  /// Best value the search could reach (e.g. minimum achievable delay).
  double best_achievable() const { return best_achievable_; }

 private:
  double best_achievable_ = 0.0;
};

}  // namespace relayee
