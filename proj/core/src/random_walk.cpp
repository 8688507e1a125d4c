#include "fluxbench/process/random_walk.hpp"

#include <algorithm>

#include "fluxbench/errors.hpp"

namespace fluxbench {

void RandomWalkParams::validate() const {
  if (!(up_probability > 0.0 && up_probability < 1.0)) {
    throw ConfigError("random_walk: up_probability must be in (0, 1)");
  }
}

ProcessState RandomWalk::initial_state() const {
  ProcessState s;
  s.y = {params_.start};
  s.t = 0.0;
  return s;
}

void RandomWalk::step(ProcessState& state, const NoiseSpec& /*noise*/,
                      double dt, RngStream& rng) const {
  if (!(dt > 0.0)) throw ConfigError("random_walk: dt must be > 0");
  const double move = rng.uniform01() <= params_.up_probability ? 1.0 : -1.0;
  state.y[0] = std::max(state.y[0] + move, 0.0);
  state.t += 1.0;
}

void RandomWalk::set_param(const std::string& name, double value) {
  if (name == "up_probability") {
    params_.up_probability = value;
  } else if (name == "start") {
    params_.start = value;
  } else {
    throw ConfigError("random_walk: unknown parameter '" + name + "'");
  }
}

double RandomWalk::get_param(const std::string& name) const {
  if (name == "up_probability") return params_.up_probability;
  if (name == "start") return params_.start;
  throw ConfigError("random_walk: unknown parameter '" + name + "'");
}

}  // namespace fluxbench
