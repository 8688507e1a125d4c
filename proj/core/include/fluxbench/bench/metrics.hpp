#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fluxbench {

double rmse(const std::vector<double>& predictions,
            const std::vector<double>& targets);

inline constexpr std::size_t kNumMetrics = 7;
inline constexpr std::array<const char*, kNumMetrics> kMetricNames = {
    "rmse", "t_hyper", "t_train", "t_test", "t_deploy", "delta_p",
    "total_alarms"};

/// The seven evaluation metrics for one (model, dataset) pair, in reporting
/// order: RMSE, hyperparameter-search/train/test/deploy wall times, alarm
/// probability gap, total alarms.
struct MetricVector {
  std::array<double, kNumMetrics> values{};

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

/// Per-dataset metric table, one row per model.
struct MetricTable {
  std::vector<std::string> models;
  std::vector<MetricVector> rows;
  /// Metric columns whose cross-model maximum was zero (left unscaled).
  std::vector<std::size_t> zero_columns;
};

/// Divides each metric by its maximum across models; the maximum entries
/// become exactly 1. All-zero columns stay zero and are noted.
MetricTable scale_metrics(const MetricTable& table);

struct WeightVector {
  std::array<double, kNumMetrics> a{};

  void validate() const;
  static WeightVector reference();  // the default weighting
};

double cost(const MetricVector& scaled, const WeightVector& weights);

/// Dense competition-free ranks, 1 = lowest cost; exactly equal costs share
/// a rank. The result is keyed by model name.
std::map<std::string, double> rank_models(
    const std::vector<std::string>& models, const std::vector<double>& costs);

/// Mean of per-dataset ranks; every model must be ranked on every dataset.
std::map<std::string, double> average_local_ranking(
    const std::vector<std::map<std::string, double>>& rankings);

struct WeightBounds {
  std::array<std::pair<double, double>, kNumMetrics> bounds{};

  void validate() const;
  static WeightBounds reference();  // default sampling bounds
};

std::vector<WeightVector> sample_weight_vectors(const WeightBounds& bounds,
                                                std::size_t count,
                                                std::uint64_t seed);

/// For each weight vector and dataset: costs, then local ranks; ranks are
/// averaged over datasets and then over weight vectors.
std::map<std::string, double> global_ranking(
    const std::vector<MetricTable>& scaled_tables,
    const std::vector<WeightVector>& weights);

}  // namespace fluxbench
