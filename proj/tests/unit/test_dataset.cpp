#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "fluxbench/data/pipeline.hpp"
#include "fluxbench/errors.hpp"
#include "fluxbench/process/random_walk.hpp"
#include "fluxbench/rng.hpp"

using namespace fluxbench;

namespace {

/// Forest stub with one record per given committer value, all at the same
/// interface.
FfsResult forest_of(const std::vector<double>& p_values, std::size_t interface,
                    double response_value = 0.45) {
  FfsResult result;
  result.response_name = "up_probability";
  result.response_value = response_value;
  for (std::size_t i = 0; i < p_values.size(); ++i) {
    CrossingRecord rec;
    rec.id = i;
    rec.interface_index = interface;
    rec.p_b = p_values[i];
    rec.state.y = {static_cast<double>(i)};
    rec.response_value = response_value;
    result.forest.push_back(std::move(rec));
  }
  return result;
}

}  // namespace

TEST_CASE("filter retains rows inside mean +- c sigma") {
  // Mean 0.5 and population sigma 0.1 exactly: 0.75/0.65/0.35/0.25 plus
  // thirteen rows at 0.5.
  std::vector<double> values = {0.75, 0.65, 0.35, 0.25};
  for (int i = 0; i < 13; ++i) values.push_back(0.5);
  const auto forest = forest_of(values, 1);

  FilterConfig cfg;
  cfg.factors = {2.0};
  const auto retained = filter_by_interface({&forest}, cfg);

  std::set<std::size_t> kept(retained.begin(), retained.end());
  CHECK(!kept.contains(0));  // 0.75 > 0.5 + 2 * 0.1
  CHECK(kept.contains(1));   // 0.65 inside
  CHECK(kept.contains(2));
  CHECK(!kept.contains(3));  // 0.25 < 0.5 - 2 * 0.1
  CHECK(retained.size() == values.size() - 2);
}

TEST_CASE("filter keeps identical rows (sigma = 0) and single rows") {
  const auto identical = forest_of({0.3, 0.3, 0.3}, 0);
  FilterConfig cfg;
  cfg.factors = {1.0};
  CHECK(filter_by_interface({&identical}, cfg).size() == 3);

  const auto singleton = forest_of({0.9}, 2);
  CHECK(filter_by_interface({&singleton}, cfg).size() == 1);
}

TEST_CASE("a huge filter factor is the identity") {
  RngStream rng(8);
  std::vector<double> values;
  for (int i = 0; i < 1000; ++i) values.push_back(rng.uniform01());
  const auto forest = forest_of(values, 0);
  FilterConfig cfg;
  cfg.factors = {1e300};
  CHECK(filter_by_interface({&forest}, cfg).size() == 1000);
}

TEST_CASE("every retained row satisfies the interval inequality") {
  RngStream rng(9);
  std::vector<double> values;
  for (int i = 0; i < 1000; ++i) values.push_back(rng.uniform01());
  const auto forest = forest_of(values, 0);

  FilterConfig cfg;
  cfg.factors = {1.0};
  FilterStats stats;
  const auto retained = filter_by_interface({&forest}, cfg, &stats);
  CHECK(stats.input_rows == 1000);
  CHECK(retained.size() < 1000);  // c=1 must drop tails of a uniform sample

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sigma = std::sqrt(ss / static_cast<double>(values.size()));
  for (std::size_t idx : retained) {
    CHECK(values[idx] >= mean - sigma);
    CHECK(values[idx] <= mean + sigma);
  }
}

TEST_CASE("assemble builds one row per retained crossing") {
  const RandomWalk model;
  auto forest = forest_of({0.1, 0.2, 0.3, 0.4}, 0);
  AssembleOptions options;
  options.response_values = {0.45};
  const std::vector<std::size_t> retained = {0, 2, 3};
  const auto data = assemble({&forest}, retained, model, options);
  CHECK(data.n_rows() == 3);
  CHECK(data.n_cols() == 2);  // pos + response action
  CHECK(data.columns[0].name == "pos");
  CHECK(data.columns[1].name == "up_probability");
  CHECK(data.columns[1].kind == ColumnKind::Discrete);
  CHECK(data.targets == std::vector<double>{0.1, 0.3, 0.4});
}

TEST_CASE("assemble marks the response column with the sweep's value set") {
  const RandomWalk model;
  auto a = forest_of({0.1, 0.2}, 0, 0.40);
  auto b = forest_of({0.3}, 0, 0.45);
  AssembleOptions options;
  options.response_values = {0.45, 0.40, 0.42, 0.41, 0.43, 0.44, 0.46};
  const auto data = assemble({&a, &b}, {0, 1, 2}, model, options);
  CHECK(data.columns.back().discrete_values ==
        std::vector<double>{0.40, 0.41, 0.42, 0.43, 0.44, 0.45, 0.46});
  CHECK(data.at(0, 1) == 0.40);
  CHECK(data.at(2, 1) == 0.45);
}

TEST_CASE("assemble rejects an empty forest") {
  const RandomWalk model;
  FfsResult empty;
  empty.response_name = "up_probability";
  AssembleOptions options;
  options.response_values = {0.45};
  CHECK_THROWS_AS(assemble({&empty}, {}, model, options), RuntimeError);
}

namespace {

TabularDataset tiny_dataset(std::size_t n) {
  TabularDataset data;
  ColumnMeta col;
  col.name = "x";
  data.columns.push_back(col);
  RngStream rng(17);
  for (std::size_t i = 0; i < n; ++i) {
    data.targets.push_back(rng.uniform01());
    data.features.push_back(rng.normal());
  }
  return data;
}

}  // namespace

TEST_CASE("split produces a 70/30 partition") {
  const auto data = tiny_dataset(100);
  SplitConfig cfg;
  cfg.seed = 5;
  const auto split = train_test_split(data, cfg);
  CHECK(split.train.n_rows() == 70);
  CHECK(split.test.n_rows() == 30);

  // Disjoint and exhaustive on the feature values (all distinct here).
  std::multiset<double> seen;
  for (double v : split.train.features) seen.insert(v);
  for (double v : split.test.features) seen.insert(v);
  std::multiset<double> expected(data.features.begin(), data.features.end());
  CHECK(seen == expected);
}

TEST_CASE("split is deterministic and rejects tiny datasets") {
  const auto data = tiny_dataset(20);
  SplitConfig cfg;
  cfg.seed = 11;
  const auto a = train_test_split(data, cfg);
  const auto b = train_test_split(data, cfg);
  CHECK(a.train.features == b.train.features);
  CHECK(a.test.features == b.test.features);

  CHECK_THROWS_AS(train_test_split(tiny_dataset(1), cfg), RuntimeError);
}

TEST_CASE("scaler standardizes training columns and is frozen afterwards") {
  TabularDataset data;
  data.columns = {{"a", ColumnKind::Continuous, "", {}},
                  {"b", ColumnKind::Continuous, "", {}}};
  RngStream rng(3);
  for (int i = 0; i < 50; ++i) {
    data.targets.push_back(0.5);
    data.features.push_back(rng.normal(3.0, 2.0));
    data.features.push_back(7.0);  // constant column
  }
  const Scaler scaler = Scaler::fit(data);
  const auto scaled = scaler.apply(data.features);

  double mean = 0.0, sq = 0.0;
  for (int i = 0; i < 50; ++i) {
    mean += scaled[2 * i];
    sq += scaled[2 * i] * scaled[2 * i];
  }
  mean /= 50.0;
  const double var = sq / 50.0 - mean * mean;
  CHECK(std::abs(mean) < 1e-12);
  CHECK(var == doctest::Approx(1.0).epsilon(1e-9));

  // Constant column passes through untouched.
  CHECK(scaled[1] == 7.0);

  // Applying to new rows uses the frozen statistics.
  std::vector<double> row = {3.0, 7.0};
  scaler.apply_row(row);
  CHECK(row[0] == doctest::Approx((3.0 - scaler.means()[0]) / scaler.stds()[0]));
  CHECK(row[1] == 7.0);
}

TEST_CASE("discrete encoding maps sorted values to 0..K-1") {
  const DiscreteEncoder enc({0.59, 0.53, 0.55, 0.54, 0.58, 0.56, 0.57});
  CHECK(enc.cardinality() == 7);
  CHECK(enc.encode(0.53) == 0.0);
  CHECK(enc.encode(0.56) == 3.0);
  CHECK(enc.encode(0.59) == 6.0);

  const DiscreteEncoder single({0.4});
  CHECK(single.encode(0.4) == 0.0);

  CHECK_THROWS_AS(enc.encode(0.60), UnknownCategory);
}

TEST_CASE("feature pipeline encodes discrete columns for unscaled models too") {
  TabularDataset data;
  data.columns = {{"x", ColumnKind::Continuous, "", {}},
                  {"tau", ColumnKind::Discrete, "", {0.53, 0.54, 0.55}}};
  for (int i = 0; i < 9; ++i) {
    data.targets.push_back(0.1);
    data.features.push_back(static_cast<double>(i));
    data.features.push_back(0.53 + 0.01 * (i % 3));
  }
  const FeaturePipeline unscaled(data, false);
  const auto encoded = unscaled.transform(data);
  CHECK(encoded[1] == 0.0);
  CHECK(encoded[3] == 1.0);
  CHECK(encoded[5] == 2.0);
  CHECK(encoded[0] == 0.0);  // continuous columns untouched without scaling

  const FeaturePipeline scaled(data, true);
  const auto s = scaled.transform(data);
  double mean = 0.0;
  for (int i = 0; i < 9; ++i) mean += s[2 * i];
  CHECK(std::abs(mean) < 1e-12);

  std::vector<double> row = {4.0, 0.56};
  CHECK_THROWS_AS(unscaled.transform_row(row), UnknownCategory);
}

TEST_CASE("dataset csv round-trips bit-exactly") {
  TabularDataset data;
  data.columns = {{"x", ColumnKind::Continuous, "", {}},
                  {"tau", ColumnKind::Discrete, "min", {0.53, 0.54}}};
  data.process_id = "walk";
  data.response_action = "tau";
  RngStream rng(123);
  for (int i = 0; i < 37; ++i) {
    data.targets.push_back(rng.uniform01());
    data.features.push_back(rng.normal() * 1e3);
    data.features.push_back(i % 2 == 0 ? 0.53 : 0.54);
  }
  const auto dir = std::filesystem::temp_directory_path();
  const auto csv_path = (dir / "fluxbench_ds.csv").string();
  const auto schema_path = (dir / "fluxbench_ds.json").string();
  write_dataset_csv(csv_path, data);
  write_dataset_schema(schema_path, data);
  const auto back = read_dataset_csv(csv_path, schema_path);
  CHECK(back.targets == data.targets);
  CHECK(back.features == data.features);
  CHECK(back.columns.size() == data.columns.size());
  CHECK(back.columns[1].discrete_values == data.columns[1].discrete_values);
  CHECK(back.response_action == "tau");
  std::filesystem::remove(csv_path);
  std::filesystem::remove(schema_path);
}
