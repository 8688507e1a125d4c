#include "fluxbench/ml/linear_svr.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "fluxbench/errors.hpp"
#include "fluxbench/rng.hpp"

namespace fluxbench {

void LinearSvrRegressor::Params::validate() const {
  if (c < 0.0) throw ConfigError("linear_svr: C must be >= 0");
  if (epsilon < 0.0) throw ConfigError("linear_svr: epsilon must be >= 0");
  if (epochs < 1) throw ConfigError("linear_svr: epochs must be >= 1");
  if (!(lr0 > 0.0)) throw ConfigError("linear_svr: lr0 must be > 0");
}

LinearSvrRegressor::Params LinearSvrRegressor::Params::from_set(
    const ParamSet& set) {
  Params p;
  p.c = param_real(set, "C", p.c);
  p.epsilon = param_real(set, "epsilon", p.epsilon);
  p.epochs = static_cast<std::size_t>(
      param_int(set, "epochs", static_cast<std::int64_t>(p.epochs)));
  p.lr0 = param_real(set, "lr0", p.lr0);
  p.seed = static_cast<std::uint64_t>(param_int(set, "seed", 0));
  return p;
}

ParamSet LinearSvrRegressor::Params::to_set() const {
  return {{"C", c},
          {"epsilon", epsilon},
          {"epochs", static_cast<std::int64_t>(epochs)},
          {"lr0", lr0},
          {"seed", static_cast<std::int64_t>(seed)}};
}

void LinearSvrRegressor::fit(const Matrix& x, const std::vector<double>& y) {
  params_.validate();
  check_fit_inputs(x, y);
  const std::size_t n = y.size();
  const std::size_t d = x.cols;

  weights_.assign(d, 0.0);
  bias_ = 0.0;
  if (params_.c == 0.0) {
    // Regularization-only objective: w = 0; the loss does not constrain b,
    // so it is pinned to the training-target mean.
    double sum = 0.0;
    for (double v : y) sum += v;
    bias_ = sum / static_cast<double>(n);
    fitted_ = true;
    fitted_cols_ = d;
    return;
  }

  std::vector<double> w(d, 0.0);
  double b = 0.0;
  std::vector<double> w_avg(d, 0.0);
  double b_avg = 0.0;
  std::size_t avg_count = 0;

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  RngStream shuffle_rng(derive_seed(params_.seed, "svr_shuffle"));

  const std::size_t total_steps = params_.epochs * n;
  const std::size_t tail_start = total_steps - total_steps / 4;
  std::size_t t = 0;
  const double cn = params_.c * static_cast<double>(n);

  for (std::size_t epoch = 0; epoch < params_.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    for (std::size_t i : order) {
      ++t;
      // 1/t schedule for the 1-strongly-convex regularized objective.
      const double lr =
          params_.lr0 / (1.0 + params_.lr0 * static_cast<double>(t));
      const auto row = x.row(i);
      double f = b;
      for (std::size_t j = 0; j < d; ++j) f += w[j] * row[j];
      const double residual = y[i] - f;

      double pull = 0.0;  // subgradient sign of the epsilon-insensitive loss
      if (residual > params_.epsilon) {
        pull = 1.0;
      } else if (residual < -params_.epsilon) {
        pull = -1.0;
      }
      for (std::size_t j = 0; j < d; ++j) {
        w[j] -= lr * (w[j] - cn * pull * row[j]);
      }
      b += lr * cn * pull;

      if (t > tail_start) {
        for (std::size_t j = 0; j < d; ++j) w_avg[j] += w[j];
        b_avg += b;
        ++avg_count;
      }
    }
  }

  if (avg_count > 0) {
    for (std::size_t j = 0; j < d; ++j) {
      weights_[j] = w_avg[j] / static_cast<double>(avg_count);
    }
    bias_ = b_avg / static_cast<double>(avg_count);
  } else {
    weights_ = w;
    bias_ = b;
  }
  fitted_ = true;
  fitted_cols_ = d;
}

double LinearSvrRegressor::predict_row(std::span<const double> row) const {
  check_predict_width(row.size());
  double f = bias_;
  for (std::size_t j = 0; j < row.size(); ++j) f += weights_[j] * row[j];
  return f;
}

double LinearSvrRegressor::objective(const Matrix& x,
                                     const std::vector<double>& y) const {
  double reg = 0.0;
  for (double w : weights_) reg += w * w;
  double loss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = std::abs(y[i] - predict_row(x.row(i)));
    loss += std::max(0.0, r - params_.epsilon);
  }
  return 0.5 * reg + params_.c * loss;
}

std::string LinearSvrRegressor::serialize() const {
  nlohmann::json out = {
      {"format_version", 1},
      {"kind", kind()},
      {"params", nlohmann::json::parse(param_set_to_json(params_.to_set()))},
      {"model", {{"weights", weights_}, {"bias", bias_}}},
  };
  return out.dump();
}

std::unique_ptr<LinearSvrRegressor> LinearSvrRegressor::deserialize_payload(
    const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  auto model = std::make_unique<LinearSvrRegressor>(
      Params::from_set(param_set_from_json(j.at("params").dump())));
  model->weights_ = j.at("model").at("weights").get<std::vector<double>>();
  model->bias_ = j.at("model").at("bias").get<double>();
  model->fitted_ = true;
  model->fitted_cols_ = model->weights_.size();
  return model;
}

}  // namespace fluxbench
