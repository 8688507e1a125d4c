#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fluxbench/process/state.hpp"
#include "fluxbench/rng.hpp"

namespace fluxbench {

/// A steppable stochastic process. One step consumes a deterministic amount
/// of randomness from the stream, so (state, stream state) -> next state is a
/// pure function and trajectories are reproducible bit for bit.
class ProcessModel {
 public:
  virtual ~ProcessModel() = default;

  virtual std::string name() const = 0;
  virtual std::vector<std::string> state_names() const = 0;
  virtual ProcessState initial_state() const = 0;

  /// Advances the state by dt (or one event for discrete processes). The
  /// disturbance is drawn once and held constant across the step.
  virtual void step(ProcessState& state, const NoiseSpec& noise, double dt,
                    RngStream& rng) const = 0;

  /// Scalar projection used to place interfaces; never mutates the state.
  virtual double order_parameter(const ProcessState& state) const = 0;

  /// Sets a named process parameter (response-action variable or any
  /// constant from the parameter table). Throws ConfigError for unknown
  /// names.
  virtual void set_param(const std::string& name, double value) = 0;
  virtual double get_param(const std::string& name) const = 0;

  virtual std::unique_ptr<ProcessModel> clone() const = 0;
};

Basin classify_basin(const ProcessModel& model, const ProcessState& state,
                     const BasinSpec& basins);

/// Integrates a trajectory of t_sim/dt steps (plus the initial state),
/// optionally truncated at basin-B entry.
Trajectory simulate(const ProcessModel& model, const ProcessState& initial,
                    const NoiseSpec& noise, const SimConfig& config,
                    const BasinSpec* basins = nullptr);

/// CSV with header `t,<state fields>,lambda`.
void export_trajectory_csv(const std::string& path, const ProcessModel& model,
                           const Trajectory& traj);

}  // namespace fluxbench
