#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fluxbench/alarm/alarm.hpp"
#include "fluxbench/bench/metrics.hpp"
#include "fluxbench/data/pipeline.hpp"
#include "fluxbench/ml/regressor.hpp"
#include "fluxbench/tune/search.hpp"

namespace fluxbench {

/// One model family entry in a benchmark run.
struct ModelPlan {
  std::string kind;
  ParamSet fixed_params;  // applied on top of the tuned ones
  std::optional<HyperparamSpace> space;  // default space when absent
};

struct BenchSettings {
  SearchConfig search;
  AlarmSpec alarms;
  DeploymentConfig deployment;
  double response_value = 0.0;
  WeightVector weights = WeightVector::reference();
  std::uint64_t master_seed = 0;
  std::size_t jobs = 1;
};

/// Everything produced for one (model, dataset) pair.
struct ModelOutcome {
  std::string kind;
  SearchResult search;
  std::string model_json;
  MetricVector metrics;
  std::vector<AlarmEpisode> episodes;
  std::size_t delta_p_undefined_levels = 0;
  std::size_t diverged_sims = 0;
  std::size_t basin_b_entries = 0;
  std::string failure;  // non-empty when the model failed and was excluded
};

struct BenchOutcome {
  std::vector<ModelOutcome> models;  // completing models only
  std::vector<std::string> failed_models;
  MetricTable metrics;
  MetricTable scaled;
  std::vector<double> costs;
  std::map<std::string, double> ranking;
};

/// Tunes, trains, tests and deploys every planned model on one dataset.
/// Deployment shares the per-simulation seed list across models. Model
/// stages run sequentially so the per-model wall-clock metrics are not
/// polluted by sibling work.
BenchOutcome run_benchmark(const TabularDataset& train,
                           const TabularDataset& test,
                           const std::vector<ModelPlan>& plans,
                           const ProcessModel& model, const NoiseSpec& noise,
                           const BasinSpec& basins,
                           const BenchSettings& settings);

/// Builds the live-state predictor for a trained model: assembles the
/// feature row from the process state plus the fixed response-action value,
/// pushes it through the fitted pipeline, and clamps nothing (clamping is
/// the alarm layer's job).
StatePredictor make_state_predictor(const Regressor& model,
                                    const FeaturePipeline& pipeline,
                                    const TabularDataset& train,
                                    const ProcessModel& process,
                                    double response_value);

void write_metrics_csv(const std::string& path, const MetricTable& table);
MetricTable read_metrics_csv(const std::string& path);
void write_costs_csv(const std::string& path,
                     const std::vector<std::string>& models,
                     const std::vector<double>& costs);
void write_ranking_csv(const std::string& path,
                       const std::map<std::string, double>& ranking);

/// Run manifest: config hash, seed, versions and every file the run emitted.
class Manifest {
 public:
  Manifest(std::string config_json, std::uint64_t master_seed);

  void add_file(const std::string& path);
  void add_note(const std::string& key, const std::string& value);
  void add_number(const std::string& key, double value);
  void write(const std::string& path) const;

 private:
  std::string config_json_;
  std::uint64_t master_seed_ = 0;
  std::vector<std::string> files_;
  std::vector<std::pair<std::string, std::string>> notes_;
  std::vector<std::pair<std::string, double>> numbers_;
};

}  // namespace fluxbench
