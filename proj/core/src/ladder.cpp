#include "fluxbench/ffs/ladder.hpp"

#include "fluxbench/errors.hpp"

namespace fluxbench {

void InterfaceLadder::validate(const BasinSpec& basins) const {
  if (values.size() < 2) {
    throw ConfigError("ladder: need at least two interfaces");
  }
  if (direction != basins.direction) {
    throw ConfigError("ladder: direction must match the basin spec");
  }
  const bool increasing = direction == TransitionDirection::Increasing;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const bool ok =
        increasing ? values[i] > values[i - 1] : values[i] < values[i - 1];
    if (!ok) {
      throw ConfigError(
          "ladder: interfaces must be strictly monotone in the transition "
          "direction");
    }
  }
  if (values.front() != basins.basin_a_bound ||
      values.back() != basins.basin_b_bound) {
    throw ConfigError("ladder: lambda_0/lambda_n must equal the basin bounds");
  }
}

InterfaceLadder InterfaceLadder::uniform(const BasinSpec& basins,
                                         std::size_t levels) {
  if (levels == 0) throw ConfigError("ladder: need at least one level");
  basins.validate();
  InterfaceLadder ladder;
  ladder.direction = basins.direction;
  ladder.values.resize(levels + 1);
  const double a = basins.basin_a_bound;
  const double b = basins.basin_b_bound;
  for (std::size_t i = 0; i <= levels; ++i) {
    ladder.values[i] =
        a + (b - a) * static_cast<double>(i) / static_cast<double>(levels);
  }
  ladder.values.back() = b;
  return ladder;
}

}  // namespace fluxbench
