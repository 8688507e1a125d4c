#include "fluxbench/ml/dnn.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "fluxbench/errors.hpp"
#include "fluxbench/rng.hpp"

namespace fluxbench {

void DnnRegressor::Params::validate() const {
  if (hidden.empty()) throw ConfigError("dnn: need at least one hidden layer");
  for (std::size_t w : hidden) {
    if (w < 1) throw ConfigError("dnn: layer widths must be >= 1");
  }
  if (epochs < 1) throw ConfigError("dnn: epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("dnn: batch_size must be >= 1");
  if (!(learning_rate > 0.0)) {
    throw ConfigError("dnn: learning_rate must be > 0");
  }
}

DnnRegressor::Params DnnRegressor::Params::from_set(const ParamSet& set) {
  Params p;
  const auto width = param_int(set, "width", 0);
  const auto depth = param_int(set, "depth", 2);
  if (width > 0) {
    p.hidden.assign(static_cast<std::size_t>(depth),
                    static_cast<std::size_t>(width));
  }
  p.epochs = static_cast<std::size_t>(
      param_int(set, "epochs", static_cast<std::int64_t>(p.epochs)));
  p.batch_size = static_cast<std::size_t>(
      param_int(set, "batch_size", static_cast<std::int64_t>(p.batch_size)));
  p.learning_rate = param_real(set, "learning_rate", p.learning_rate);
  const std::string opt = param_string(set, "optimizer", "adam");
  if (opt == "adam") {
    p.optimizer = Optimizer::Adam;
  } else if (opt == "sgd") {
    p.optimizer = Optimizer::Sgd;
  } else {
    throw ConfigError("dnn: unknown optimizer '" + opt + "'");
  }
  p.seed = static_cast<std::uint64_t>(param_int(set, "seed", 0));
  return p;
}

ParamSet DnnRegressor::Params::to_set() const {
  return {
      {"width", static_cast<std::int64_t>(hidden.empty() ? 0 : hidden[0])},
      {"depth", static_cast<std::int64_t>(hidden.size())},
      {"epochs", static_cast<std::int64_t>(epochs)},
      {"batch_size", static_cast<std::int64_t>(batch_size)},
      {"learning_rate", learning_rate},
      {"optimizer",
       optimizer == Optimizer::Adam ? std::string("adam") : std::string("sgd")},
      {"seed", static_cast<std::int64_t>(seed)},
  };
}

void DnnRegressor::initialize(std::size_t input_width) {
  params_.validate();
  layers_.clear();
  RngStream rng(derive_seed(params_.seed, "dnn_init"));
  std::size_t in = input_width;
  for (std::size_t width : params_.hidden) {
    Layer layer;
    layer.in = in;
    layer.out = width;
    layer.w.resize(width * in);
    layer.b.assign(width, 0.0);
    const double sd = std::sqrt(2.0 / static_cast<double>(in));
    for (double& w : layer.w) w = rng.normal(0.0, sd);
    layers_.push_back(std::move(layer));
    in = width;
  }
  Layer out_layer;
  out_layer.in = in;
  out_layer.out = 1;
  out_layer.w.resize(in);
  out_layer.b.assign(1, 0.0);
  const double sd = std::sqrt(1.0 / static_cast<double>(in));
  for (double& w : out_layer.w) w = rng.normal(0.0, sd);
  layers_.push_back(std::move(out_layer));
  fitted_cols_ = input_width;
  fitted_ = true;  // a freshly initialized network is usable, just untrained
}

double DnnRegressor::forward(
    std::span<const double> row,
    std::vector<std::vector<double>>* activations) const {
  std::vector<double> current(row.begin(), row.end());
  if (activations != nullptr) {
    activations->clear();
    activations->push_back(current);
  }
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    std::vector<double> next(layer.out, 0.0);
    for (std::size_t o = 0; o < layer.out; ++o) {
      double z = layer.b[o];
      const double* w = layer.w.data() + o * layer.in;
      for (std::size_t i = 0; i < layer.in; ++i) z += w[i] * current[i];
      const bool is_output = l + 1 == layers_.size();
      next[o] = is_output ? z : std::max(z, 0.0);
    }
    current = std::move(next);
    if (activations != nullptr) activations->push_back(current);
  }
  return current[0];
}

void DnnRegressor::accumulate_gradient(std::span<const double> row,
                                       double target, double inv_batch,
                                       std::vector<Layer>& grad) const {
  std::vector<std::vector<double>> acts;
  const double pred = forward(row, &acts);
  // d(MSE)/d(pred) for a batch-mean loss.
  double upstream_scalar = 2.0 * (pred - target) * inv_batch;

  std::vector<double> upstream{upstream_scalar};
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const Layer& layer = layers_[l];
    const std::vector<double>& input = acts[l];
    const std::vector<double>& output = acts[l + 1];
    std::vector<double> next_upstream(layer.in, 0.0);
    for (std::size_t o = 0; o < layer.out; ++o) {
      double delta = upstream[o];
      const bool is_output = l + 1 == layers_.size();
      if (!is_output && output[o] <= 0.0) delta = 0.0;  // ReLU gate
      if (delta == 0.0) continue;
      grad[l].b[o] += delta;
      double* gw = grad[l].w.data() + o * layer.in;
      const double* w = layer.w.data() + o * layer.in;
      for (std::size_t i = 0; i < layer.in; ++i) {
        gw[i] += delta * input[i];
        next_upstream[i] += delta * w[i];
      }
    }
    upstream = std::move(next_upstream);
  }
}

void DnnRegressor::fit(const Matrix& x, const std::vector<double>& y) {
  check_fit_inputs(x, y);
  initialize(x.cols);
  const std::size_t n = y.size();

  std::vector<Layer> grad = layers_;
  std::vector<Layer> m = layers_;  // Adam first moment
  std::vector<Layer> v = layers_;  // Adam second moment
  const auto zero = [](std::vector<Layer>& ls) {
    for (Layer& l : ls) {
      std::fill(l.w.begin(), l.w.end(), 0.0);
      std::fill(l.b.begin(), l.b.end(), 0.0);
    }
  };
  zero(m);
  zero(v);

  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  std::size_t adam_t = 0;

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  RngStream shuffle_rng(derive_seed(params_.seed, "dnn_shuffle"));

  for (std::size_t epoch = 0; epoch < params_.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    for (std::size_t start = 0; start < n; start += params_.batch_size) {
      const std::size_t end = std::min(n, start + params_.batch_size);
      const double inv_batch = 1.0 / static_cast<double>(end - start);
      zero(grad);
      double batch_loss = 0.0;
      for (std::size_t i = start; i < end; ++i) {
        const auto row = x.row(order[i]);
        const double pred = forward(row, nullptr);
        const double err = pred - y[order[i]];
        batch_loss += err * err * inv_batch;
        accumulate_gradient(row, y[order[i]], inv_batch, grad);
      }
      if (!std::isfinite(batch_loss)) {
        throw TrainingDiverged(
            "dnn: non-finite loss; try a smaller learning rate");
      }
      ++adam_t;
      for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto update = [&](std::vector<double>& param,
                                std::vector<double>& g, std::vector<double>& m1,
                                std::vector<double>& m2) {
          for (std::size_t i = 0; i < param.size(); ++i) {
            if (params_.optimizer == Optimizer::Sgd) {
              param[i] -= params_.learning_rate * g[i];
            } else {
              m1[i] = kBeta1 * m1[i] + (1.0 - kBeta1) * g[i];
              m2[i] = kBeta2 * m2[i] + (1.0 - kBeta2) * g[i] * g[i];
              const double mhat =
                  m1[i] / (1.0 - std::pow(kBeta1, static_cast<double>(adam_t)));
              const double vhat =
                  m2[i] / (1.0 - std::pow(kBeta2, static_cast<double>(adam_t)));
              param[i] -=
                  params_.learning_rate * mhat / (std::sqrt(vhat) + kEps);
            }
          }
        };
        update(layers_[l].w, grad[l].w, m[l].w, v[l].w);
        update(layers_[l].b, grad[l].b, m[l].b, v[l].b);
      }
    }
  }
  fitted_ = true;
}

double DnnRegressor::predict_row(std::span<const double> row) const {
  check_predict_width(row.size());
  return forward(row, nullptr);
}

double DnnRegressor::loss(const Matrix& x, const std::vector<double>& y) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double err = forward(x.row(i), nullptr) - y[i];
    acc += err * err;
  }
  return acc / static_cast<double>(y.size());
}

std::vector<double> DnnRegressor::gradients(const Matrix& x,
                                            const std::vector<double>& y) const {
  std::vector<Layer> grad = layers_;
  for (Layer& l : grad) {
    std::fill(l.w.begin(), l.w.end(), 0.0);
    std::fill(l.b.begin(), l.b.end(), 0.0);
  }
  const double inv_batch = 1.0 / static_cast<double>(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    accumulate_gradient(x.row(i), y[i], inv_batch, grad);
  }
  std::vector<double> flat;
  for (const Layer& l : grad) {
    flat.insert(flat.end(), l.w.begin(), l.w.end());
    flat.insert(flat.end(), l.b.begin(), l.b.end());
  }
  return flat;
}

std::vector<double> DnnRegressor::parameters() const {
  std::vector<double> flat;
  for (const Layer& l : layers_) {
    flat.insert(flat.end(), l.w.begin(), l.w.end());
    flat.insert(flat.end(), l.b.begin(), l.b.end());
  }
  return flat;
}

void DnnRegressor::set_parameters(const std::vector<double>& flat) {
  std::size_t pos = 0;
  for (Layer& l : layers_) {
    for (double& w : l.w) w = flat.at(pos++);
    for (double& b : l.b) b = flat.at(pos++);
  }
  if (pos != flat.size()) {
    throw RuntimeError("dnn: parameter vector size mismatch");
  }
}

std::string DnnRegressor::serialize() const {
  nlohmann::json layers = nlohmann::json::array();
  for (const Layer& l : layers_) {
    layers.push_back({{"in", l.in}, {"out", l.out}, {"w", l.w}, {"b", l.b}});
  }
  nlohmann::json out = {
      {"format_version", 1},
      {"kind", kind()},
      {"params", nlohmann::json::parse(param_set_to_json(params_.to_set()))},
      {"model", {{"layers", std::move(layers)}}},
  };
  return out.dump();
}

std::unique_ptr<DnnRegressor> DnnRegressor::deserialize_payload(
    const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  auto model = std::make_unique<DnnRegressor>(
      Params::from_set(param_set_from_json(j.at("params").dump())));
  for (const auto& lj : j.at("model").at("layers")) {
    Layer l;
    l.in = lj.at("in").get<std::size_t>();
    l.out = lj.at("out").get<std::size_t>();
    l.w = lj.at("w").get<std::vector<double>>();
    l.b = lj.at("b").get<std::vector<double>>();
    model->layers_.push_back(std::move(l));
  }
  if (model->layers_.empty()) throw RuntimeError("dnn: empty serialization");
  model->fitted_ = true;
  model->fitted_cols_ = model->layers_.front().in;
  return model;
}

}  // namespace fluxbench
