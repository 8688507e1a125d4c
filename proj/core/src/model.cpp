#include "fluxbench/process/model.hpp"

#include <cmath>
#include <fstream>

#include "fluxbench/csv.hpp"
#include "fluxbench/errors.hpp"

namespace fluxbench {

bool ProcessState::finite() const {
  if (!std::isfinite(t)) return false;
  for (double v : y) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void NoiseSpec::validate() const {
  if (variance < 0.0) throw ConfigError("noise: variance must be >= 0");
}

void BasinSpec::validate() const {
  if (direction == TransitionDirection::Increasing) {
    if (!(basin_a_bound < basin_b_bound)) {
      throw ConfigError(
          "basins: increasing transition needs basin_a_bound < basin_b_bound");
    }
  } else {
    if (!(basin_a_bound > basin_b_bound)) {
      throw ConfigError(
          "basins: decreasing transition needs basin_a_bound > basin_b_bound");
    }
  }
}

Basin BasinSpec::classify(double lambda) const {
  if (direction == TransitionDirection::Increasing) {
    if (lambda <= basin_a_bound) return Basin::A;
    if (lambda >= basin_b_bound) return Basin::B;
  } else {
    if (lambda >= basin_a_bound) return Basin::A;
    if (lambda <= basin_b_bound) return Basin::B;
  }
  return Basin::Transition;
}

bool BasinSpec::past(double lambda, double threshold) const {
  return direction == TransitionDirection::Increasing ? lambda >= threshold
                                                      : lambda <= threshold;
}

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("sim: dt must be > 0");
  if (!(t_sim >= dt)) throw ConfigError("sim: t_sim must be >= dt");
}

Basin classify_basin(const ProcessModel& model, const ProcessState& state,
                     const BasinSpec& basins) {
  return basins.classify(model.order_parameter(state));
}

Trajectory simulate(const ProcessModel& model, const ProcessState& initial,
                    const NoiseSpec& noise, const SimConfig& config,
                    const BasinSpec* basins) {
  config.validate();
  noise.validate();
  const auto n_steps =
      static_cast<std::size_t>(std::llround(config.t_sim / config.dt));
  RngStream rng(config.seed);

  Trajectory traj;
  traj.times.reserve(n_steps + 1);
  traj.states.reserve(n_steps + 1);
  traj.lambdas.reserve(n_steps + 1);

  ProcessState state = initial;
  traj.times.push_back(state.t);
  traj.lambdas.push_back(model.order_parameter(state));
  traj.states.push_back(state);

  for (std::size_t i = 0; i < n_steps; ++i) {
    model.step(state, noise, config.dt, rng);
    traj.times.push_back(state.t);
    traj.lambdas.push_back(model.order_parameter(state));
    traj.states.push_back(state);
    if (config.stop_on_basin_b && basins != nullptr &&
        basins->classify(traj.lambdas.back()) == Basin::B) {
      break;
    }
  }
  return traj;
}

void export_trajectory_csv(const std::string& path, const ProcessModel& model,
                           const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw RuntimeError("cannot write trajectory to " + path);
  out << "t";
  for (const auto& name : model.state_names()) out << ',' << name;
  out << ",lambda\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out << csv::format_double(traj.times[i]);
    for (double v : traj.states[i].y) out << ',' << csv::format_double(v);
    out << ',' << csv::format_double(traj.lambdas[i]) << '\n';
  }
}

}  // namespace fluxbench
