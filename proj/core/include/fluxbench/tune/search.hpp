#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "fluxbench/data/dataset.hpp"
#include "fluxbench/ml/regressor.hpp"
#include "fluxbench/rng.hpp"

namespace fluxbench {

enum class SamplerKind { Random, Grid };

struct SearchConfig {
  std::size_t budget = 30;
  SamplerKind sampler = SamplerKind::Random;
  std::size_t k_folds = 3;
  std::uint64_t seed = 0;
  /// Grid resolution for real-valued domains.
  std::size_t grid_points = 10;

  void validate() const;
};

/// Disjoint, exhaustive folds with sizes differing by at most one, shuffled
/// by seed. Fold f holds the row indices of validation set f.
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n_rows,
                                                  std::size_t k,
                                                  std::uint64_t seed);

/// Trains on k-1 folds and scores RMSE on the held-out fold, for each fold in
/// turn; returns the mean of the k validation scores. A fit failure in any
/// fold marks the whole trial as failed (+infinity).
double cross_validate(const std::string& kind, const ParamSet& params,
                      const TabularDataset& train,
                      const std::vector<std::vector<std::size_t>>& folds);

struct Trial {
  std::size_t index = 0;
  ParamSet params;
  double mean_rmse = std::numeric_limits<double>::infinity();
  double wall_time_s = 0.0;
};

struct SearchResult {
  ParamSet best_params;
  double best_score = std::numeric_limits<double>::infinity();
  std::size_t best_trial = 0;
  std::vector<Trial> trials;
  double t_hyper_s = 0.0;  // wall-clock around the whole search
};

/// Samples `budget` configurations from the space (seeded), cross-validates
/// each, and returns the argmin of mean validation RMSE with the earliest
/// trial winning ties.
SearchResult search(const std::string& kind, const HyperparamSpace& space,
                    const TabularDataset& train, const SearchConfig& config);

/// Trials log: CSV `trial,params_json,mean_rmse,wall_time_s`.
void write_trials_csv(const std::string& path,
                      const std::vector<Trial>& trials);

/// Deterministic draw of one configuration from a space.
ParamSet sample_params(const HyperparamSpace& space, RngStream& rng);

}  // namespace fluxbench
