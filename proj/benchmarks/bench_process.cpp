#include <benchmark/benchmark.h>

#include "fluxbench/process/exothermic.hpp"
#include "fluxbench/process/polystyrene.hpp"

namespace {

using namespace fluxbench;

void BM_ExothermicStep(benchmark::State& state) {
  const ExothermicCstr model;
  const NoiseSpec noise{0.0, 0.02};
  ProcessState s = model.initial_state();
  RngStream rng(7);
  for (auto _ : state) {
    model.step(s, noise, 0.01, rng);
    benchmark::DoNotOptimize(s.y[1]);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ExothermicStep);

void BM_PolystyreneStep(benchmark::State& state) {
  const PolystyreneCstr model;
  const NoiseSpec noise{0.0, 0.0014};
  ProcessState s = model.initial_state();
  RngStream rng(8);
  for (auto _ : state) {
    model.step(s, noise, 0.001, rng);
    benchmark::DoNotOptimize(s.y[2]);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PolystyreneStep);

}  // namespace
