#include "fluxbench/bench/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "fluxbench/errors.hpp"
#include "fluxbench/rng.hpp"

namespace fluxbench {

double rmse(const std::vector<double>& predictions,
            const std::vector<double>& targets) {
  if (predictions.empty() || predictions.size() != targets.size()) {
    throw RuntimeError("rmse: need equal, non-zero lengths");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - targets[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(predictions.size()));
}

MetricTable scale_metrics(const MetricTable& table) {
  if (table.rows.empty()) throw RuntimeError("scale_metrics: no models");
  MetricTable out;
  out.models = table.models;
  out.rows = table.rows;
  for (std::size_t m = 0; m < kNumMetrics; ++m) {
    double max_v = 0.0;
    for (const MetricVector& row : table.rows) {
      if (row[m] < 0.0) {
        throw RuntimeError("scale_metrics: negative metric value");
      }
      max_v = std::max(max_v, row[m]);
    }
    if (max_v == 0.0) {
      out.zero_columns.push_back(m);
      continue;
    }
    for (MetricVector& row : out.rows) row[m] /= max_v;
  }
  return out;
}

void WeightVector::validate() const {
  for (double v : a) {
    if (!(v > 0.0)) throw ConfigError("weights: coefficients must be > 0");
  }
}

WeightVector WeightVector::reference() {
  return {{0.125, 0.05, 0.05, 0.05, 0.125, 0.3, 0.3}};
}

double cost(const MetricVector& scaled, const WeightVector& weights) {
  double acc = 0.0;
  for (std::size_t i = 0; i < kNumMetrics; ++i) {
    acc += weights.a[i] * scaled[i];
  }
  return acc;
}

std::map<std::string, double> rank_models(const std::vector<std::string>& models,
                                          const std::vector<double>& costs) {
  if (models.empty() || models.size() != costs.size()) {
    throw RuntimeError("rank_models: need one cost per model");
  }
  std::vector<double> sorted = costs;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::map<std::string, double> ranks;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto pos = static_cast<double>(
        std::lower_bound(sorted.begin(), sorted.end(), costs[i]) -
        sorted.begin());
    ranks[models[i]] = pos + 1.0;
  }
  return ranks;
}

std::map<std::string, double> average_local_ranking(
    const std::vector<std::map<std::string, double>>& rankings) {
  if (rankings.empty()) {
    throw RuntimeError("average_local_ranking: no rankings");
  }
  std::map<std::string, double> mean = rankings.front();
  for (auto& [model, value] : mean) value = 0.0;
  for (const auto& ranking : rankings) {
    if (ranking.size() != mean.size()) {
      throw RuntimeError("average_local_ranking: model sets differ");
    }
    for (auto& [model, acc] : mean) {
      auto it = ranking.find(model);
      if (it == ranking.end()) {
        throw RuntimeError("average_local_ranking: missing model '" + model +
                           "'");
      }
      acc += it->second;
    }
  }
  for (auto& [model, acc] : mean) {
    acc /= static_cast<double>(rankings.size());
  }
  return mean;
}

void WeightBounds::validate() const {
  for (const auto& [lo, hi] : bounds) {
    if (!(lo > 0.0)) throw ConfigError("weight bounds: lower bound must be > 0");
    if (!(lo <= hi)) throw ConfigError("weight bounds: need lo <= hi");
  }
}

WeightBounds WeightBounds::reference() {
  WeightBounds b;
  b.bounds = {{{0.1, 0.2},
               {0.05, 0.1},
               {0.05, 0.1},
               {0.05, 0.1},
               {0.1, 0.2},
               {0.3, 4.0},
               {0.3, 4.0}}};
  return b;
}

std::vector<WeightVector> sample_weight_vectors(const WeightBounds& bounds,
                                                std::size_t count,
                                                std::uint64_t seed) {
  bounds.validate();
  RngStream rng(derive_seed(seed, "weights"));
  std::vector<WeightVector> out(count);
  for (WeightVector& w : out) {
    for (std::size_t i = 0; i < kNumMetrics; ++i) {
      w.a[i] = rng.uniform(bounds.bounds[i].first, bounds.bounds[i].second);
    }
  }
  return out;
}

std::map<std::string, double> global_ranking(
    const std::vector<MetricTable>& scaled_tables,
    const std::vector<WeightVector>& weights) {
  if (scaled_tables.empty()) throw RuntimeError("global_ranking: no datasets");
  if (weights.empty()) throw RuntimeError("global_ranking: no weight vectors");

  std::map<std::string, double> total;
  for (const WeightVector& w : weights) {
    std::vector<std::map<std::string, double>> per_dataset;
    per_dataset.reserve(scaled_tables.size());
    for (const MetricTable& table : scaled_tables) {
      std::vector<double> costs;
      costs.reserve(table.rows.size());
      for (const MetricVector& row : table.rows) costs.push_back(cost(row, w));
      per_dataset.push_back(rank_models(table.models, costs));
    }
    const auto averaged = average_local_ranking(per_dataset);
    if (total.empty()) {
      for (const auto& [model, value] : averaged) total[model] = 0.0;
    }
    for (const auto& [model, value] : averaged) total.at(model) += value;
  }
  for (auto& [model, value] : total) {
    value /= static_cast<double>(weights.size());
  }
  return total;
}

}  // namespace fluxbench
