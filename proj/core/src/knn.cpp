#include "fluxbench/ml/knn.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "fluxbench/errors.hpp"

namespace fluxbench {

void KnnRegressor::Params::validate() const {
  if (k < 1) throw ConfigError("knn: k must be >= 1");
  if (metric == Metric::Minkowski && !(minkowski_p >= 1.0)) {
    throw ConfigError("knn: minkowski_p must be >= 1");
  }
}

KnnRegressor::Params KnnRegressor::Params::from_set(const ParamSet& set) {
  Params p;
  p.k = static_cast<std::size_t>(
      param_int(set, "k", static_cast<std::int64_t>(p.k)));
  const std::string metric = param_string(set, "metric", "euclidean");
  if (metric == "euclidean") {
    p.metric = Metric::Euclidean;
  } else if (metric == "manhattan") {
    p.metric = Metric::Manhattan;
  } else if (metric == "minkowski") {
    p.metric = Metric::Minkowski;
  } else {
    throw ConfigError("knn: unknown metric '" + metric + "'");
  }
  p.minkowski_p = param_real(set, "minkowski_p", p.minkowski_p);
  return p;
}

ParamSet KnnRegressor::Params::to_set() const {
  std::string name = "euclidean";
  if (metric == Metric::Manhattan) name = "manhattan";
  if (metric == Metric::Minkowski) name = "minkowski";
  return {{"k", static_cast<std::int64_t>(k)},
          {"metric", name},
          {"minkowski_p", minkowski_p}};
}

void KnnRegressor::fit(const Matrix& x, const std::vector<double>& y) {
  params_.validate();
  check_fit_inputs(x, y);
  if (params_.k > y.size()) {
    throw RuntimeError("knn: k exceeds the number of training rows");
  }
  train_x_ = x;
  train_y_ = y;
  fitted_ = true;
  fitted_cols_ = x.cols;
}

double KnnRegressor::distance(std::span<const double> a,
                              std::span<const double> b) const {
  double acc = 0.0;
  switch (params_.metric) {
    case Metric::Euclidean:
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
      }
      return std::sqrt(acc);
    case Metric::Manhattan:
      for (std::size_t i = 0; i < a.size(); ++i) {
        acc += std::abs(a[i] - b[i]);
      }
      return acc;
    case Metric::Minkowski:
      for (std::size_t i = 0; i < a.size(); ++i) {
        acc += std::pow(std::abs(a[i] - b[i]), params_.minkowski_p);
      }
      return std::pow(acc, 1.0 / params_.minkowski_p);
  }
  return acc;
}

double KnnRegressor::predict_row(std::span<const double> row) const {
  check_predict_width(row.size());
  std::vector<std::pair<double, std::size_t>> dist(train_y_.size());
  for (std::size_t i = 0; i < train_y_.size(); ++i) {
    dist[i] = {distance(row, train_x_.row(i)), i};
  }
  std::partial_sort(dist.begin(), dist.begin() + static_cast<long>(params_.k),
                    dist.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < params_.k; ++i) {
    sum += train_y_[dist[i].second];
  }
  return sum / static_cast<double>(params_.k);
}

std::string KnnRegressor::serialize() const {
  nlohmann::json out = {
      {"format_version", 1},
      {"kind", kind()},
      {"params", nlohmann::json::parse(param_set_to_json(params_.to_set()))},
      {"model",
       {{"rows", train_x_.rows},
        {"cols", train_x_.cols},
        {"x", train_x_.data},
        {"y", train_y_}}},
  };
  return out.dump();
}

std::unique_ptr<KnnRegressor> KnnRegressor::deserialize_payload(
    const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  auto model = std::make_unique<KnnRegressor>(
      Params::from_set(param_set_from_json(j.at("params").dump())));
  const auto& m = j.at("model");
  model->train_x_ = Matrix(m.at("rows").get<std::size_t>(),
                           m.at("cols").get<std::size_t>(),
                           m.at("x").get<std::vector<double>>());
  model->train_y_ = m.at("y").get<std::vector<double>>();
  model->fitted_ = true;
  model->fitted_cols_ = model->train_x_.cols;
  return model;
}

}  // namespace fluxbench
