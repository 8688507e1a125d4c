#include "fluxbench/ffs/engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "fluxbench/csv.hpp"
#include "fluxbench/errors.hpp"
#include "fluxbench/parallel.hpp"

namespace fluxbench {

void BranchConfig::validate(std::size_t levels) const {
  if (branch_counts.size() != levels) {
    throw ConfigError("branching: need one branch count per level");
  }
  for (std::size_t m : branch_counts) {
    if (m < 1) throw ConfigError("branching: branch counts must be >= 1");
  }
  if (seed_count < 1) throw ConfigError("branching: seed_count must be >= 1");
}

InitialFluxResult collect_initial_crossings(const ProcessModel& model,
                                            const BasinSpec& basins,
                                            const NoiseSpec& noise,
                                            const InitialFluxConfig& config,
                                            std::uint64_t seed) {
  basins.validate();
  if (config.target_count < 1) {
    throw ConfigError("initial flux: target_count must be >= 1");
  }
  if (!(config.dt > 0.0)) throw ConfigError("initial flux: dt must be > 0");

  InitialFluxResult result;
  const auto steps_per_traj = static_cast<std::size_t>(
      std::llround(config.trajectory_time / config.dt));

  for (std::size_t traj = 0; traj < config.max_trajectories; ++traj) {
    RngStream rng(derive_seed(seed, "initial_flux", traj));
    ProcessState state = model.initial_state();
    Basin prev = basins.classify(model.order_parameter(state));
    ++result.trajectories_used;

    for (std::size_t i = 0; i < steps_per_traj; ++i) {
      if (prev == Basin::A) result.basin_a_time += config.dt;
      model.step(state, noise, config.dt, rng);
      const Basin now = basins.classify(model.order_parameter(state));
      if (prev == Basin::A && now != Basin::A) {
        CrossingRecord rec;
        rec.interface_index = 0;
        rec.state = state;
        result.crossings.push_back(std::move(rec));
        ++result.total_crossings;
      }
      prev = now;
    }
    if (result.total_crossings >= config.target_count) break;
  }

  if (result.total_crossings < config.target_count) {
    throw InsufficientFlux(
        "initial flux: collected " + std::to_string(result.total_crossings) +
        " lambda_0 crossings out of " + std::to_string(config.target_count) +
        " within " + std::to_string(result.trajectories_used) +
        " trajectories");
  }
  if (result.basin_a_time > 0.0) {
    result.r0 =
        static_cast<double>(result.total_crossings) / result.basin_a_time;
  }
  return result;
}

BranchOutcome grow_branches(const CrossingRecord& from, std::size_t m,
                            const InterfaceLadder& ladder,
                            const BasinSpec& basins, const ProcessModel& model,
                            const NoiseSpec& noise, double dt,
                            std::size_t max_steps) {
  const std::size_t level = from.interface_index;
  if (level + 1 >= ladder.values.size()) {
    throw RuntimeError("grow_branches: crossing already at the last interface");
  }
  const double next_interface = ladder.values[level + 1];

  BranchOutcome outcome;
  for (std::size_t b = 0; b < m; ++b) {
    RngStream rng(derive_seed(from.rng_tag, 2 * level + 1, b));
    ProcessState state = from.state;
    bool resolved = false;
    for (std::size_t s = 0; s < max_steps; ++s) {
      model.step(state, noise, dt, rng);
      const double lambda = model.order_parameter(state);
      if (basins.past(lambda, next_interface)) {
        CrossingRecord child;
        child.interface_index = level + 1;
        child.parent = from.id;
        child.state = state;
        child.rng_tag = derive_seed(from.rng_tag, 2 * level, b);
        child.response_value = from.response_value;
        outcome.children.push_back(std::move(child));
        resolved = true;
        break;
      }
      if (basins.classify(lambda) == Basin::A) {
        ++outcome.failures;
        resolved = true;
        break;
      }
    }
    if (!resolved) {
      ++outcome.failures;
      ++outcome.max_step_hits;
    }
  }
  return outcome;
}

std::vector<double> committer_denominators(const BranchConfig& config,
                                           std::size_t levels) {
  std::vector<double> denom(levels + 1, 1.0);
  for (std::size_t i = levels; i-- > 0;) {
    denom[i] = static_cast<double>(config.branch_counts[i]) * denom[i + 1];
  }
  return denom;
}

void committer_probabilities(Forest& forest, const BranchConfig& config,
                             std::size_t levels) {
  const auto denom = committer_denominators(config, levels);
  std::unordered_map<std::uint64_t, std::size_t> index;
  index.reserve(forest.size());
  for (std::size_t i = 0; i < forest.size(); ++i) index[forest[i].id] = i;

  // Leaf counts accumulated from the last interface backwards. Exact while
  // counts stay below 2^53; at that point the ratio is still the correctly
  // rounded mean.
  std::vector<double> leaves(forest.size(), 0.0);
  std::vector<std::size_t> order(forest.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return forest[a].interface_index > forest[b].interface_index;
  });

  for (std::size_t idx : order) {
    CrossingRecord& rec = forest[idx];
    if (rec.interface_index == levels) {
      leaves[idx] = 1.0;
    } else {
      double sum = 0.0;
      for (std::uint64_t child : rec.children) {
        sum += leaves[index.at(child)];
      }
      leaves[idx] = sum;
    }
    rec.p_b = leaves[idx] / denom[rec.interface_index];
  }
}

double transition_probability(const Forest& forest, std::uint64_t root_id,
                              const BranchConfig& config, std::size_t levels) {
  const auto denom = committer_denominators(config, levels);
  std::unordered_map<std::uint64_t, std::size_t> index;
  index.reserve(forest.size());
  for (std::size_t i = 0; i < forest.size(); ++i) index[forest[i].id] = i;

  // Count branches that reached the last interface under this root.
  double reached = 0.0;
  std::vector<std::uint64_t> stack{root_id};
  while (!stack.empty()) {
    const CrossingRecord& rec = forest[index.at(stack.back())];
    stack.pop_back();
    if (rec.interface_index == levels) {
      reached += 1.0;
      continue;
    }
    for (std::uint64_t child : rec.children) stack.push_back(child);
  }
  return reached / denom[0];
}

FfsResult run_bgffs(const ProcessModel& model, const BasinSpec& basins,
                    const InterfaceLadder& ladder, const BgffsOptions& options,
                    const NoiseSpec& noise, std::uint64_t master_seed,
                    const std::string& response_name, double response_value) {
  basins.validate();
  ladder.validate(basins);
  const std::size_t levels = ladder.levels();
  options.branching.validate(levels);

  FfsResult result;
  result.response_name = response_name;
  result.response_value = response_value;

  InitialFluxConfig flux = options.initial_flux;
  flux.dt = options.dt;
  flux.target_count = std::max(flux.target_count, options.branching.seed_count);
  result.initial = collect_initial_crossings(
      model, basins, noise, flux, derive_seed(master_seed, "flux_stage", 0));
  result.r0 = result.initial.r0;

  // Evenly spaced subsample of the collected crossings as tree seeds.
  const std::size_t collected = result.initial.crossings.size();
  const std::size_t n_seeds = options.branching.seed_count;
  Forest& forest = result.forest;
  std::uint64_t next_id = 0;
  for (std::size_t s = 0; s < n_seeds; ++s) {
    CrossingRecord root = result.initial.crossings[s * collected / n_seeds];
    root.id = next_id++;
    root.rng_tag = derive_seed(master_seed, "tree", s);
    root.response_value = response_value;
    forest.push_back(std::move(root));
  }

  std::size_t frontier_begin = 0;
  for (std::size_t level = 0; level < levels; ++level) {
    const std::size_t frontier_end = forest.size();
    const std::size_t m = options.branching.branch_counts[level];
    std::vector<BranchOutcome> outcomes(frontier_end - frontier_begin);
    parallel_for(outcomes.size(), options.jobs, [&](std::size_t i) {
      outcomes[i] =
          grow_branches(forest[frontier_begin + i], m, ladder, basins, model,
                        noise, options.dt, options.branching.max_branch_steps);
    });
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      BranchOutcome& out = outcomes[i];
      CrossingRecord& parent = forest[frontier_begin + i];
      parent.n_success = out.children.size();
      result.branches_simulated += m;
      result.branch_failures += out.failures;
      result.max_step_hits += out.max_step_hits;
      for (CrossingRecord& child : out.children) {
        child.id = next_id++;
        parent.children.push_back(child.id);
      }
      for (CrossingRecord& child : out.children) {
        forest.push_back(std::move(child));
      }
    }
    frontier_begin = frontier_end;
  }

  committer_probabilities(forest, options.branching, levels);

  result.per_seed_p.reserve(n_seeds);
  double p_sum = 0.0;
  for (std::size_t s = 0; s < n_seeds; ++s) {
    const double p =
        transition_probability(forest, forest[s].id, options.branching, levels);
    // The recursion at a root must reduce to the reached-branch ratio.
    if (p != forest[s].p_b.value()) {
      throw RuntimeError("ffs: committer recursion does not match the "
                         "branch-count ratio at a root");
    }
    result.per_seed_p.push_back(p);
    p_sum += p;
  }
  result.p_mean = p_sum / static_cast<double>(n_seeds);
  result.r_mean = result.r0 * result.p_mean;
  return result;
}

namespace {

void append_forest_rows(csv::Table& table, const FfsResult& result) {
  for (const CrossingRecord& rec : result.forest) {
    std::vector<std::string> row;
    row.push_back(std::to_string(rec.interface_index));
    row.push_back(std::to_string(rec.id));
    row.push_back(rec.parent ? std::to_string(*rec.parent) : "");
    row.push_back(csv::format_double(rec.p_b.value_or(0.0)));
    for (double v : rec.state.y) row.push_back(csv::format_double(v));
    row.push_back(result.response_name);
    row.push_back(csv::format_double(rec.response_value));
    table.rows.push_back(std::move(row));
  }
}

}  // namespace

void export_forest_csv(const std::string& path, const ProcessModel& model,
                       const std::vector<const FfsResult*>& results) {
  csv::Table table;
  table.header = {"interface_index", "crossing_id", "parent_id", "p_B"};
  for (const auto& name : model.state_names()) table.header.push_back(name);
  table.header.push_back("response_action");
  table.header.push_back("response_action_value");
  for (const FfsResult* result : results) append_forest_rows(table, *result);
  csv::write_file(path, table);
}

void export_forest_csv(const std::string& path, const ProcessModel& model,
                       const FfsResult& result) {
  export_forest_csv(path, model, {&result});
}

std::string ffs_summary_json(const std::vector<const FfsResult*>& results) {
  nlohmann::json out = nlohmann::json::array();
  for (const FfsResult* r : results) {
    out.push_back({
        {"response_action", r->response_name},
        {"response_value", r->response_value},
        {"r0", r->r0},
        {"p_mean", r->p_mean},
        {"r_mean", r->r_mean},
        {"seeds", r->per_seed_p.size()},
        {"per_seed_p", r->per_seed_p},
        {"crossings", r->forest.size()},
        {"branches_simulated", r->branches_simulated},
        {"branch_failures", r->branch_failures},
        {"max_step_hits", r->max_step_hits},
        {"initial_crossings", r->initial.total_crossings},
        {"initial_trajectories", r->initial.trajectories_used},
        {"basin_a_time", r->initial.basin_a_time},
    });
  }
  return out.dump(2);
}

}  // namespace fluxbench
