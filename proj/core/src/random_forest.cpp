#include "fluxbench/ml/random_forest.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "fluxbench/errors.hpp"

namespace fluxbench {

void RandomForestRegressor::Params::validate() const {
  if (n_estimators < 1) throw ConfigError("forest: n_estimators must be >= 1");
  if (!(sample_fraction > 0.0 && sample_fraction <= 1.0)) {
    throw ConfigError("forest: sample_fraction must be in (0, 1]");
  }
  if (!(feature_fraction > 0.0 && feature_fraction <= 1.0)) {
    throw ConfigError("forest: feature_fraction must be in (0, 1]");
  }
}

RandomForestRegressor::Params RandomForestRegressor::Params::from_set(
    const ParamSet& set) {
  Params p;
  p.n_estimators = static_cast<std::size_t>(
      param_int(set, "n_estimators", static_cast<std::int64_t>(p.n_estimators)));
  p.max_depth = static_cast<std::size_t>(
      param_int(set, "max_depth", static_cast<std::int64_t>(p.max_depth)));
  p.min_samples_split = static_cast<std::size_t>(param_int(
      set, "min_samples_split", static_cast<std::int64_t>(p.min_samples_split)));
  p.bootstrap = param_int(set, "bootstrap", 1) != 0;
  p.sample_fraction = param_real(set, "sample_fraction", p.sample_fraction);
  p.feature_fraction = param_real(set, "feature_fraction", p.feature_fraction);
  p.seed = static_cast<std::uint64_t>(param_int(set, "seed", 0));
  return p;
}

ParamSet RandomForestRegressor::Params::to_set() const {
  return {
      {"n_estimators", static_cast<std::int64_t>(n_estimators)},
      {"max_depth", static_cast<std::int64_t>(max_depth)},
      {"min_samples_split", static_cast<std::int64_t>(min_samples_split)},
      {"bootstrap", static_cast<std::int64_t>(bootstrap ? 1 : 0)},
      {"sample_fraction", sample_fraction},
      {"feature_fraction", feature_fraction},
      {"seed", static_cast<std::int64_t>(seed)},
  };
}

void RandomForestRegressor::fit(const Matrix& x, const std::vector<double>& y) {
  params_.validate();
  check_fit_inputs(x, y);
  const std::size_t n = y.size();

  trees_.assign(params_.n_estimators, RegressionTree{});
  bases_.assign(params_.n_estimators, 0.0);

  TreeGrowthParams growth;
  growth.max_depth = params_.max_depth;
  growth.min_samples_split = params_.min_samples_split;
  growth.feature_fraction = params_.feature_fraction;

  for (std::size_t t = 0; t < params_.n_estimators; ++t) {
    RngStream rng(derive_seed(params_.seed, "member", t));

    std::vector<std::size_t> rows;
    if (params_.bootstrap) {
      const auto k = std::max<std::size_t>(
          1, static_cast<std::size_t>(
                 std::llround(params_.sample_fraction * static_cast<double>(n))));
      rows.reserve(k);
      for (std::size_t i = 0; i < k; ++i) {
        rows.push_back(static_cast<std::size_t>(rng.below(n)));
      }
      std::sort(rows.begin(), rows.end());
    } else {
      rows.resize(n);
      for (std::size_t i = 0; i < n; ++i) rows[i] = i;
    }

    // Member targets are offsets from the member's own training mean, the
    // same arithmetic as the plain tree.
    double sum = 0.0;
    for (std::size_t r : rows) sum += y[r];
    const double base = sum / static_cast<double>(rows.size());
    std::vector<double> residuals(n, 0.0);
    for (std::size_t r : rows) residuals[r] = y[r] - base;
    // Duplicated bootstrap rows overwrite with the same value; targets are
    // per-row, so multiplicity is carried by the row list.

    bases_[t] = base;
    RngStream* rng_ptr = params_.feature_fraction < 1.0 ? &rng : nullptr;
    trees_[t].fit(x, residuals, rows, growth, rng_ptr);
  }
  fitted_ = true;
  fitted_cols_ = x.cols;
}

double RandomForestRegressor::member_predict(std::size_t member,
                                             std::span<const double> row) const {
  return bases_[member] + trees_[member].eval(row);
}

double RandomForestRegressor::predict_row(std::span<const double> row) const {
  check_predict_width(row.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    sum += member_predict(t, row);
  }
  return sum / static_cast<double>(trees_.size());
}

std::string RandomForestRegressor::serialize() const {
  nlohmann::json members = nlohmann::json::array();
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    members.push_back({{"base", bases_[t]},
                       {"nodes", nlohmann::json::parse(trees_[t].nodes_json())}});
  }
  nlohmann::json out = {
      {"format_version", 1},
      {"kind", kind()},
      {"params", nlohmann::json::parse(param_set_to_json(params_.to_set()))},
      {"model", {{"members", std::move(members)}}},
  };
  return out.dump();
}

std::unique_ptr<RandomForestRegressor> RandomForestRegressor::deserialize_payload(
    const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  auto model = std::make_unique<RandomForestRegressor>(
      Params::from_set(param_set_from_json(j.at("params").dump())));
  for (const auto& m : j.at("model").at("members")) {
    model->bases_.push_back(m.at("base").get<double>());
    model->trees_.push_back(RegressionTree::from_nodes_json(m.at("nodes").dump()));
  }
  if (model->trees_.empty()) throw RuntimeError("forest: empty serialization");
  model->fitted_ = true;
  return model;
}

}  // namespace fluxbench
