#pragma once

#include <stdexcept>
#include <string>

namespace fluxbench {

/// Invalid or inconsistent configuration (bad field, missing section, ...).
/// The CLI maps this family to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Any error raised while running a pipeline stage; mapped to exit code 2.
class RuntimeError : public std::runtime_error {
 public:
  explicit RuntimeError(const std::string& what) : std::runtime_error(what) {}
};

/// A process trajectory produced a non-finite state.
class SimulationDiverged : public RuntimeError {
 public:
  explicit SimulationDiverged(const std::string& what) : RuntimeError(what) {}
};

/// The initial-flux stage exhausted its trajectory budget before collecting
/// the requested number of interface crossings.
class InsufficientFlux : public RuntimeError {
 public:
  explicit InsufficientFlux(const std::string& what) : RuntimeError(what) {}
};

/// A discrete feature value outside the declared admissible set.
class UnknownCategory : public RuntimeError {
 public:
  explicit UnknownCategory(const std::string& what) : RuntimeError(what) {}
};

/// Model training produced a non-finite loss.
class TrainingDiverged : public RuntimeError {
 public:
  explicit TrainingDiverged(const std::string& what) : RuntimeError(what) {}
};

}  // namespace fluxbench
