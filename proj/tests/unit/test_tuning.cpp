#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "fluxbench/bench/metrics.hpp"
#include "fluxbench/csv.hpp"
#include "fluxbench/errors.hpp"
#include "fluxbench/rng.hpp"
#include "fluxbench/tune/search.hpp"

using namespace fluxbench;

namespace {

TabularDataset dataset_with_targets(const std::vector<double>& targets) {
  TabularDataset data;
  data.columns = {{"x", ColumnKind::Continuous, "", {}}};
  RngStream rng(13);
  for (double t : targets) {
    data.targets.push_back(t);
    data.features.push_back(rng.normal());
  }
  return data;
}

TabularDataset random_dataset(std::size_t n, std::uint64_t seed) {
  TabularDataset data;
  data.columns = {{"x", ColumnKind::Continuous, "", {}},
                  {"z", ColumnKind::Continuous, "", {}}};
  RngStream rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.uniform(-1.0, 1.0);
    const double z = rng.uniform(-1.0, 1.0);
    data.features.push_back(x);
    data.features.push_back(z);
    data.targets.push_back(std::clamp(0.5 + 0.3 * x - 0.2 * z, 0.0, 1.0));
  }
  return data;
}

}  // namespace

TEST_CASE("nine rows split into three folds of three") {
  const auto folds = kfold_split(9, 3, 4);
  REQUIRE(folds.size() == 3);
  std::set<std::size_t> seen;
  for (const auto& fold : folds) {
    CHECK(fold.size() == 3);
    seen.insert(fold.begin(), fold.end());
  }
  CHECK(seen.size() == 9);
}

TEST_CASE("fold sizes differ by at most one and are reproducible") {
  const auto a = kfold_split(10, 3, 5);
  const auto b = kfold_split(10, 3, 5);
  CHECK(a == b);
  std::vector<std::size_t> sizes;
  for (const auto& fold : a) sizes.push_back(fold.size());
  CHECK(*std::max_element(sizes.begin(), sizes.end()) -
            *std::min_element(sizes.begin(), sizes.end()) <=
        1);
  CHECK_THROWS_AS(kfold_split(2, 3, 1), RuntimeError);
}

TEST_CASE("cross-validating a constant-mean model on stratified folds") {
  const auto data =
      dataset_with_targets({0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 2.0, 2.0, 2.0});
  const std::vector<std::vector<std::size_t>> folds = {
      {0, 1, 2}, {3, 4, 5}, {6, 7, 8}};

  // gbdt with a zero learning rate predicts the training mean exactly.
  ParamSet params;
  params["eta"] = 0.0;
  params["n_estimators"] = std::int64_t{1};

  const double mean_rmse = cross_validate("gbdt_level", params, data, folds);
  // Fold means: 1.5 -> RMSE 1.5 on (0,0,0); 1.0 -> RMSE 0 on (1,1,1);
  // 0.5 -> RMSE 1.5 on (2,2,2). Mean over the three folds: 1.0.
  CHECK(mean_rmse == doctest::Approx(1.0).epsilon(1e-12));

  // Fold-1 score in isolation.
  TabularDataset train_23 = data.take({3, 4, 5, 6, 7, 8});
  auto model = make_regressor("gbdt_level", params);
  Matrix x(train_23.n_rows(), 1, train_23.features);
  model->fit(x, train_23.targets);
  TabularDataset val = data.take({0, 1, 2});
  Matrix vx(val.n_rows(), 1, val.features);
  CHECK(rmse(model->predict(vx), val.targets) ==
        doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("a model that interpolates duplicated rows scores zero") {
  TabularDataset data;
  data.columns = {{"x", ColumnKind::Continuous, "", {}}};
  for (int rep = 0; rep < 2; ++rep) {
    for (int i = 0; i < 6; ++i) {
      data.targets.push_back(0.1 * i);
      data.features.push_back(static_cast<double>(i));
    }
  }
  // Duplicate every row across both folds, then memorize with 1-NN.
  const std::vector<std::vector<std::size_t>> folds = {{0, 1, 2, 3, 4, 5},
                                                       {6, 7, 8, 9, 10, 11}};
  ParamSet params;
  params["k"] = std::int64_t{1};
  CHECK(cross_validate("knn", params, data, folds) == 0.0);
}

TEST_CASE("a failing configuration scores infinity") {
  const auto data = dataset_with_targets({0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
  const auto folds = kfold_split(6, 3, 2);
  ParamSet params;
  params["k"] = std::int64_t{100};  // larger than any training fold
  CHECK(std::isinf(cross_validate("knn", params, data, folds)));
}

TEST_CASE("search returns the argmin with deterministic repeats") {
  const auto data = random_dataset(60, 3);
  SearchConfig cfg;
  cfg.budget = 8;
  cfg.k_folds = 3;
  cfg.seed = 77;
  const auto a = search("knn", default_hyperparam_space("knn"), data, cfg);
  const auto b = search("knn", default_hyperparam_space("knn"), data, cfg);

  CHECK(a.trials.size() == 8);
  CHECK(a.best_trial == b.best_trial);
  CHECK(a.best_score == b.best_score);
  CHECK(param_set_to_json(a.best_params) == param_set_to_json(b.best_params));
  CHECK(a.t_hyper_s > 0.0);

  double best = std::numeric_limits<double>::infinity();
  for (const auto& trial : a.trials) best = std::min(best, trial.mean_rmse);
  CHECK(a.best_score == best);
  for (const auto& trial : a.trials) {
    if (trial.index < a.best_trial) {
      CHECK(trial.mean_rmse > a.best_score);  // earliest trial wins ties
    }
  }
}

TEST_CASE("budget of one returns the single candidate") {
  const auto data = random_dataset(30, 4);
  SearchConfig cfg;
  cfg.budget = 1;
  cfg.seed = 5;
  const auto result = search("knn", default_hyperparam_space("knn"), data, cfg);
  CHECK(result.trials.size() == 1);
  CHECK(result.best_trial == 0);
}

TEST_CASE("search fails when every trial fails") {
  const auto data = random_dataset(12, 6);
  HyperparamSpace space;
  space.domains = {{"k", ParamDomain::Kind::Integer, 500, 600, false, {}}};
  SearchConfig cfg;
  cfg.budget = 3;
  cfg.seed = 1;
  CHECK_THROWS_AS(search("knn", space, data, cfg), RuntimeError);
}

TEST_CASE("grid sampler enumerates the cartesian product in order") {
  const auto data = random_dataset(30, 8);
  HyperparamSpace space;
  space.domains = {{"k", ParamDomain::Kind::Integer, 1, 3, false, {}},
                   {"metric",
                    ParamDomain::Kind::Categorical,
                    0,
                    0,
                    false,
                    {"euclidean", "manhattan"}}};
  SearchConfig cfg;
  cfg.budget = 6;
  cfg.sampler = SamplerKind::Grid;
  cfg.seed = 2;
  const auto result = search("knn", space, data, cfg);
  CHECK(result.trials.size() == 6);
  CHECK(param_int(result.trials[0].params, "k", -1) == 1);
  CHECK(param_string(result.trials[0].params, "metric", "") == "euclidean");
  CHECK(param_string(result.trials[1].params, "metric", "") == "manhattan");
  CHECK(param_int(result.trials[2].params, "k", -1) == 2);
}

TEST_CASE("sampled parameters respect their domains") {
  RngStream rng(9);
  HyperparamSpace space = default_hyperparam_space("gbdt_level");
  for (int i = 0; i < 200; ++i) {
    const auto params = sample_params(space, rng);
    const double eta = param_real(params, "eta", -1.0);
    CHECK(eta >= 0.01);
    CHECK(eta <= 0.5);
    const double lambda = param_real(params, "reg_lambda", -1.0);
    CHECK(lambda >= 0.0);
    CHECK(lambda <= 10.0);
  }
}

TEST_CASE("logged trial scores are recomputable from their parameters") {
  const auto data = random_dataset(45, 19);
  SearchConfig cfg;
  cfg.budget = 4;
  cfg.k_folds = 3;
  cfg.seed = 23;
  const auto result = search("knn", default_hyperparam_space("knn"), data, cfg);
  const auto folds = kfold_split(data.n_rows(), cfg.k_folds,
                                 derive_seed(cfg.seed, "folds:knn"));
  for (const auto& trial : result.trials) {
    CHECK(cross_validate("knn", trial.params, data, folds) == trial.mean_rmse);
  }
}

TEST_CASE("the trials log matches the search result") {
  const auto data = random_dataset(40, 10);
  SearchConfig cfg;
  cfg.budget = 5;
  cfg.seed = 12;
  const auto result =
      search("decision_tree", default_hyperparam_space("decision_tree"), data,
             cfg);
  const auto path =
      (std::filesystem::temp_directory_path() / "fluxbench_trials.csv").string();
  write_trials_csv(path, result.trials);
  const auto table = csv::read_file(path);
  CHECK(table.header ==
        std::vector<std::string>{"trial", "params_json", "mean_rmse",
                                 "wall_time_s"});
  REQUIRE(table.rows.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(csv::parse_double(table.rows[i][2]) == result.trials[i].mean_rmse);
    // The embedded JSON reparses to the identical parameter set.
    CHECK(param_set_to_json(param_set_from_json(table.rows[i][1])) ==
          param_set_to_json(result.trials[i].params));
  }
  std::filesystem::remove(path);
}
