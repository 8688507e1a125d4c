#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fluxbench/bench/report.hpp"
#include "fluxbench/data/pipeline.hpp"
#include "fluxbench/ffs/engine.hpp"
#include "fluxbench/process/model.hpp"

namespace fluxbench {

/// Declarative description of a whole pipeline run, loaded from one JSON
/// config file with named sections. Every stage seed derives from the master
/// seed, so a (config, seed) pair pins all non-timing outputs.
struct RunConfig {
  std::string config_json;  // canonical text the config was parsed from

  std::string process_kind;
  std::vector<std::pair<std::string, double>> process_params;
  double dt = 0.01;

  NoiseSpec noise;
  BasinSpec basins;
  std::optional<std::vector<double>> ladder_values;
  std::size_t ladder_levels = 5;

  std::string response_name;
  std::vector<double> response_values;

  InitialFluxConfig initial_flux;
  BranchConfig branching;
  FilterConfig filter{.factors = {2.0}};

  SplitConfig split;
  std::vector<std::string> feature_fields;

  std::vector<ModelPlan> models;
  SearchConfig search;
  AlarmSpec alarms;

  std::size_t deploy_n_sim = 10;
  double deploy_t_sim = 1000.0;
  std::size_t deploy_call_freq = 30;
  double deploy_response_value = 0.0;
  std::optional<std::vector<double>> deploy_initial_state;

  WeightVector weights = WeightVector::reference();
  WeightBounds weight_bounds = WeightBounds::reference();
  std::size_t weight_samples = 500;

  std::vector<std::string> rank_metrics_files;

  std::optional<std::string> dataset_csv;     // skip FFS when present
  std::optional<std::string> dataset_schema;

  double simulate_t_sim = 100.0;
  bool simulate_stop_on_basin_b = false;

  std::uint64_t master_seed = 0;
  std::string out_dir = "out";

  std::unique_ptr<ProcessModel> make_process() const;
  InterfaceLadder make_ladder() const;
  DeploymentConfig make_deployment(std::size_t jobs) const;
};

RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text);

}  // namespace fluxbench
