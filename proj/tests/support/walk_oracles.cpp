#include "walk_oracles.hpp"

#include <cmath>

#include "fluxbench/rng.hpp"

namespace fluxbench::testing {

double ruin_probability(double p_up, int start, int upper) {
  const double r = (1.0 - p_up) / p_up;
  return (1.0 - std::pow(r, start)) / (1.0 - std::pow(r, upper));
}

double brute_force_committor(double p_up, int start, int upper,
                             std::size_t n_trajectories, std::uint64_t seed) {
  fluxbench::RngStream rng(seed);
  std::size_t reached = 0;
  for (std::size_t i = 0; i < n_trajectories; ++i) {
    int pos = start;
    while (pos > 0 && pos < upper) {
      pos += rng.uniform01() <= p_up ? 1 : -1;
    }
    if (pos >= upper) ++reached;
  }
  return static_cast<double>(reached) / static_cast<double>(n_trajectories);
}

}  // namespace fluxbench::testing
