#include <benchmark/benchmark.h>

#include "fluxbench/ffs/engine.hpp"
#include "fluxbench/process/random_walk.hpp"

namespace {

using namespace fluxbench;

void BM_WalkBgffs(benchmark::State& state) {
  RandomWalkParams params;
  params.up_probability = 0.45;
  const RandomWalk model(params);
  BasinSpec basins;
  basins.basin_a_bound = 0.0;
  basins.basin_b_bound = 20.0;
  basins.direction = TransitionDirection::Increasing;
  const auto ladder = InterfaceLadder::uniform(basins, 4);
  BgffsOptions options;
  options.branching.branch_counts = {10, 10, 10, 10};
  options.branching.seed_count = static_cast<std::size_t>(state.range(0));
  options.initial_flux.target_count = options.branching.seed_count;
  options.initial_flux.trajectory_time = 5000.0;
  options.initial_flux.max_trajectories = 10;
  options.dt = 1.0;

  std::uint64_t seed = 1;
  for (auto _ : state) {
    const auto result = run_bgffs(model, basins, ladder, options, NoiseSpec{},
                                  seed++, "up_probability", 0.45);
    benchmark::DoNotOptimize(result.p_mean);
  }
}
BENCHMARK(BM_WalkBgffs)->Arg(10)->Arg(50);

void BM_CommitterRecursion(benchmark::State& state) {
  // Dense synthetic forest: every crossing succeeds at every level.
  const std::size_t levels = 4;
  BranchConfig cfg;
  cfg.branch_counts = {4, 4, 4, 4};
  Forest forest;
  std::uint64_t next_id = 0;
  std::vector<std::uint64_t> frontier;
  CrossingRecord root;
  root.id = next_id++;
  root.interface_index = 0;
  root.state.y = {0.0};
  forest.push_back(root);
  frontier.push_back(root.id);
  for (std::size_t level = 0; level < levels; ++level) {
    std::vector<std::uint64_t> next;
    for (std::uint64_t parent : frontier) {
      for (std::size_t b = 0; b < cfg.branch_counts[level]; ++b) {
        CrossingRecord child;
        child.id = next_id++;
        child.interface_index = level + 1;
        child.parent = parent;
        child.state.y = {0.0};
        forest[parent].children.push_back(child.id);
        next.push_back(child.id);
        forest.push_back(std::move(child));
      }
    }
    frontier = std::move(next);
  }

  for (auto _ : state) {
    Forest copy = forest;
    committer_probabilities(copy, cfg, levels);
    benchmark::DoNotOptimize(copy.front().p_b);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(forest.size()));
}
BENCHMARK(BM_CommitterRecursion);

}  // namespace
