#include <benchmark/benchmark.h>

#include "fluxbench/ml/decision_tree.hpp"
#include "fluxbench/ml/gbdt.hpp"
#include "fluxbench/ml/knn.hpp"
#include "fluxbench/rng.hpp"

namespace {

using namespace fluxbench;

Matrix make_features(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Matrix x(rows, cols);
  RngStream rng(seed);
  for (double& v : x.data) v = rng.normal();
  return x;
}

std::vector<double> make_targets(std::size_t rows, std::uint64_t seed) {
  std::vector<double> y(rows);
  RngStream rng(seed);
  for (double& v : y) v = rng.uniform01();
  return y;
}

void BM_TreeFit(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const auto x = make_features(rows, 4, 1);
  const auto y = make_targets(rows, 2);
  DecisionTreeRegressor::Params params;
  params.max_depth = 8;
  for (auto _ : state) {
    DecisionTreeRegressor tree(params);
    tree.fit(x, y);
    benchmark::DoNotOptimize(tree.base());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows));
}
BENCHMARK(BM_TreeFit)->Arg(500)->Arg(5000);

void BM_GbdtFit(benchmark::State& state) {
  const auto x = make_features(1000, 4, 3);
  const auto y = make_targets(1000, 4);
  GbdtRegressor::Params params;
  params.n_estimators = static_cast<std::size_t>(state.range(0));
  params.eta = 0.1;
  params.max_depth = 4;
  for (auto _ : state) {
    GbdtRegressor model(params);
    model.fit(x, y);
    benchmark::DoNotOptimize(model.base());
  }
}
BENCHMARK(BM_GbdtFit)->Arg(20)->Arg(100);

void BM_KnnPredict(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const auto x = make_features(rows, 4, 5);
  const auto y = make_targets(rows, 6);
  KnnRegressor::Params params;
  params.k = 10;
  KnnRegressor knn(params);
  knn.fit(x, y);
  const auto queries = make_features(64, 4, 7);
  std::size_t q = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(knn.predict_row(queries.row(q % 64)));
    ++q;
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows));
}
BENCHMARK(BM_KnnPredict)->Arg(1000)->Arg(10000);

}  // namespace
