#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fluxbench/ffs/ladder.hpp"
#include "fluxbench/process/model.hpp"

namespace fluxbench {

/// A saved state at an interface crossing. Crossings form a forest: roots at
/// lambda_0, children one interface further along the transition.
struct CrossingRecord {
  std::uint64_t id = 0;
  std::size_t interface_index = 0;
  std::optional<std::uint64_t> parent;
  std::vector<std::uint64_t> children;
  std::size_t n_success = 0;  // children that reached the next interface
  std::optional<double> p_b;  // committer probability, filled by the recursion
  ProcessState state;
  std::uint64_t rng_tag = 0;  // stream tag for branches grown from this point
  double response_value = 0.0;
};

using Forest = std::vector<CrossingRecord>;

struct BranchConfig {
  /// Branch counts m_0..m_{n-1}, one per level.
  std::vector<std::size_t> branch_counts;
  /// Number of lambda_0 crossings to expand into trees.
  std::size_t seed_count = 10;
  /// A branch that neither reaches the next interface nor falls back into
  /// basin A within this many steps counts as a failure.
  std::size_t max_branch_steps = 1'000'000;

  void validate(std::size_t levels) const;
};

struct InitialFluxConfig {
  std::size_t target_count = 10;
  double trajectory_time = 1000.0;
  std::size_t max_trajectories = 100;
  double dt = 0.01;
};

struct InitialFluxResult {
  Forest crossings;  // records at interface 0, in crossing order
  double r0 = 0.0;   // outward lambda_0 crossings per unit basin-A time
  double basin_a_time = 0.0;
  std::size_t total_crossings = 0;
  std::size_t trajectories_used = 0;
};

struct FfsResult {
  double r0 = 0.0;
  std::vector<double> per_seed_p;
  double p_mean = 0.0;
  double r_mean = 0.0;  // r0 * p_mean
  Forest forest;
  double response_value = 0.0;
  std::string response_name;
  std::size_t branches_simulated = 0;
  std::size_t branch_failures = 0;
  std::size_t max_step_hits = 0;
  InitialFluxResult initial;
};

/// Runs noisy trajectories from the model's initial state, saving the state
/// at every outward lambda_0 crossing (leaving basin A in the transition
/// direction) until `target_count` crossings exist. Time is accrued only
/// while the state classifies as basin A. Throws InsufficientFlux when the
/// trajectory budget runs out first.
InitialFluxResult collect_initial_crossings(const ProcessModel& model,
                                            const BasinSpec& basins,
                                            const NoiseSpec& noise,
                                            const InitialFluxConfig& config,
                                            std::uint64_t seed);

struct BranchOutcome {
  std::vector<CrossingRecord> children;  // crossings at the next interface
  std::size_t failures = 0;
  std::size_t max_step_hits = 0;
};

/// Fires m independently seeded continuations from a crossing at interface i.
/// Each ends in success (crossing interface i+1; state saved) or failure
/// (re-entering basin A, or exceeding the step cap).
BranchOutcome grow_branches(const CrossingRecord& from, std::size_t m,
                            const InterfaceLadder& ladder,
                            const BasinSpec& basins, const ProcessModel& model,
                            const NoiseSpec& noise, double dt,
                            std::size_t max_steps);

/// Per-level committer denominators: denom[i] = m_i * m_{i+1} * ... * m_{n-1},
/// denom[n] = 1.
std::vector<double> committer_denominators(const BranchConfig& config,
                                           std::size_t levels);

/// Fills p_b at every record: terminal crossings carry 1, failed branches
/// contribute 0, and each interior record gets the mean of its children's
/// committer probabilities over the m branches fired from it. Computed with
/// integer leaf counts over the level denominators, so a root's value equals
/// the reached-branch ratio bit for bit.
void committer_probabilities(Forest& forest, const BranchConfig& config,
                             std::size_t levels);

/// Fraction of possible branch paths from this root that reached basin B.
double transition_probability(const Forest& forest, std::uint64_t root_id,
                              const BranchConfig& config, std::size_t levels);

struct BgffsOptions {
  BranchConfig branching;
  InitialFluxConfig initial_flux;
  double dt = 0.01;
  std::size_t jobs = 1;
};

/// Full pipeline: initial flux, branched growth level by level, committer
/// recursion, per-seed transition probabilities and their means. Every
/// record is stamped with `response_value`.
FfsResult run_bgffs(const ProcessModel& model, const BasinSpec& basins,
                    const InterfaceLadder& ladder, const BgffsOptions& options,
                    const NoiseSpec& noise, std::uint64_t master_seed,
                    const std::string& response_name, double response_value);

/// CSV columns: interface_index, crossing_id, parent_id, p_B, state fields,
/// response_action, response_action_value.
void export_forest_csv(const std::string& path, const ProcessModel& model,
                       const std::vector<const FfsResult*>& results);
void export_forest_csv(const std::string& path, const ProcessModel& model,
                       const FfsResult& result);

/// Summary JSON (r_0, p_mean, r_mean, counts) for one or more sweep points.
std::string ffs_summary_json(const std::vector<const FfsResult*>& results);

}  // namespace fluxbench
