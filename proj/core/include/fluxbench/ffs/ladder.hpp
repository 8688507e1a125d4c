#pragma once

#include <cstddef>
#include <vector>

#include "fluxbench/process/state.hpp"

namespace fluxbench {

/// Ordered interface values lambda_0..lambda_n between the basin bounds,
/// strictly monotone in the transition direction. lambda_0 bounds basin A and
/// lambda_n bounds basin B; there are n branching levels.
struct InterfaceLadder {
  std::vector<double> values;
  TransitionDirection direction = TransitionDirection::Decreasing;

  /// Number of branching levels (interfaces minus one).
  std::size_t levels() const { return values.empty() ? 0 : values.size() - 1; }

  void validate(const BasinSpec& basins) const;

  /// Uniformly spaced ladder with `levels` gaps between the basin bounds.
  static InterfaceLadder uniform(const BasinSpec& basins, std::size_t levels);
};

}  // namespace fluxbench
