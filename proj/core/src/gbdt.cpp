#include "fluxbench/ml/gbdt.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "fluxbench/errors.hpp"

namespace fluxbench {

void GbdtRegressor::Params::validate() const {
  if (n_estimators < 1) throw ConfigError("gbdt: n_estimators must be >= 1");
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw ConfigError("gbdt: eta must be in [0, 1]");
  }
  if (!(subsample > 0.0 && subsample <= 1.0)) {
    throw ConfigError("gbdt: subsample must be in (0, 1]");
  }
  if (reg_alpha < 0.0 || reg_lambda < 0.0) {
    throw ConfigError("gbdt: regularization must be >= 0");
  }
}

GbdtRegressor::Params GbdtRegressor::Params::from_set(
    const ParamSet& set, TreeGrowth default_growth) {
  Params p;
  p.growth = default_growth;
  p.n_estimators = static_cast<std::size_t>(
      param_int(set, "n_estimators", static_cast<std::int64_t>(p.n_estimators)));
  p.eta = param_real(set, "eta", p.eta);
  p.max_depth = static_cast<std::size_t>(
      param_int(set, "max_depth", static_cast<std::int64_t>(p.max_depth)));
  p.max_leaves = static_cast<std::size_t>(
      param_int(set, "max_leaves", static_cast<std::int64_t>(p.max_leaves)));
  p.subsample = param_real(set, "subsample", p.subsample);
  p.reg_alpha = param_real(set, "reg_alpha", p.reg_alpha);
  p.reg_lambda = param_real(set, "reg_lambda", p.reg_lambda);
  p.seed = static_cast<std::uint64_t>(param_int(set, "seed", 0));
  const std::string growth = param_string(
      set, "growth",
      default_growth == TreeGrowth::LevelWise ? "level-wise" : "leaf-wise");
  if (growth == "level-wise") {
    p.growth = TreeGrowth::LevelWise;
  } else if (growth == "leaf-wise") {
    p.growth = TreeGrowth::LeafWise;
  } else {
    throw ConfigError("gbdt: unknown growth strategy '" + growth + "'");
  }
  return p;
}

ParamSet GbdtRegressor::Params::to_set() const {
  return {
      {"n_estimators", static_cast<std::int64_t>(n_estimators)},
      {"eta", eta},
      {"max_depth", static_cast<std::int64_t>(max_depth)},
      {"max_leaves", static_cast<std::int64_t>(max_leaves)},
      {"subsample", subsample},
      {"reg_alpha", reg_alpha},
      {"reg_lambda", reg_lambda},
      {"growth",
       growth == TreeGrowth::LevelWise ? std::string("level-wise")
                                       : std::string("leaf-wise")},
      {"seed", static_cast<std::int64_t>(seed)},
  };
}

void GbdtRegressor::fit(const Matrix& x, const std::vector<double>& y) {
  params_.validate();
  check_fit_inputs(x, y);
  const std::size_t n = y.size();

  double sum = 0.0;
  for (double v : y) sum += v;
  base_ = sum / static_cast<double>(n);

  std::vector<double> pred(n, base_);
  std::vector<double> residuals(n, 0.0);
  std::vector<std::size_t> all_rows(n);
  for (std::size_t i = 0; i < n; ++i) all_rows[i] = i;

  TreeGrowthParams growth;
  growth.max_depth = params_.max_depth;
  growth.min_samples_split = 2;
  growth.reg_lambda = params_.reg_lambda;
  growth.reg_alpha = params_.reg_alpha;
  growth.growth = params_.growth;
  growth.max_leaves = params_.max_leaves;

  stages_.clear();
  stages_.reserve(params_.n_estimators);
  for (std::size_t stage = 0; stage < params_.n_estimators; ++stage) {
    for (std::size_t i = 0; i < n; ++i) residuals[i] = y[i] - pred[i];

    const std::vector<std::size_t>* rows = &all_rows;
    std::vector<std::size_t> sampled;
    if (params_.subsample < 1.0) {
      const auto k = std::max<std::size_t>(
          1, static_cast<std::size_t>(
                 std::llround(params_.subsample * static_cast<double>(n))));
      sampled = shuffled_indices(n, derive_seed(params_.seed, "subsample", stage));
      sampled.resize(k);
      std::sort(sampled.begin(), sampled.end());
      rows = &sampled;
    }

    RegressionTree tree;
    tree.fit(x, residuals, *rows, growth, nullptr);
    for (std::size_t i = 0; i < n; ++i) {
      pred[i] += params_.eta * tree.eval(x.row(i));
    }
    stages_.push_back(std::move(tree));
  }
  fitted_ = true;
  fitted_cols_ = x.cols;
}

double GbdtRegressor::predict_row(std::span<const double> row) const {
  check_predict_width(row.size());
  return predict_row_truncated(row, stages_.size());
}

double GbdtRegressor::predict_row_truncated(std::span<const double> row,
                                            std::size_t n_stages) const {
  double out = base_;
  const std::size_t m = std::min(n_stages, stages_.size());
  for (std::size_t s = 0; s < m; ++s) {
    out += params_.eta * stages_[s].eval(row);
  }
  return out;
}

std::string GbdtRegressor::serialize() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const RegressionTree& t : stages_) {
    trees.push_back(nlohmann::json::parse(t.nodes_json()));
  }
  nlohmann::json out = {
      {"format_version", 1},
      {"kind", kind()},
      {"params", nlohmann::json::parse(param_set_to_json(params_.to_set()))},
      {"model", {{"base", base_}, {"trees", std::move(trees)}}},
  };
  return out.dump();
}

std::unique_ptr<GbdtRegressor> GbdtRegressor::deserialize_payload(
    const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  const auto params = Params::from_set(param_set_from_json(j.at("params").dump()),
                                       TreeGrowth::LevelWise);
  auto model = std::make_unique<GbdtRegressor>(params);
  model->base_ = j.at("model").at("base").get<double>();
  for (const auto& t : j.at("model").at("trees")) {
    model->stages_.push_back(RegressionTree::from_nodes_json(t.dump()));
  }
  model->fitted_ = true;
  return model;
}

}  // namespace fluxbench
