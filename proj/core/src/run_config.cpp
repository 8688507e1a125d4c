#include "fluxbench/config/run_config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "fluxbench/errors.hpp"
#include "fluxbench/process/exothermic.hpp"
#include "fluxbench/process/polystyrene.hpp"
#include "fluxbench/process/random_walk.hpp"

namespace fluxbench {

namespace {

using nlohmann::json;

const json& require(const json& j, const std::string& key,
                    const std::string& section) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw ConfigError("config: missing key '" + key + "' in section '" +
                      section + "'");
  }
  return *it;
}

HyperparamSpace parse_space(const json& j) {
  HyperparamSpace space;
  for (const auto& dj : j) {
    ParamDomain d;
    d.name = require(dj, "name", "space").get<std::string>();
    const std::string kind = require(dj, "kind", "space").get<std::string>();
    if (kind == "int") {
      d.kind = ParamDomain::Kind::Integer;
    } else if (kind == "real") {
      d.kind = ParamDomain::Kind::Real;
    } else if (kind == "categorical") {
      d.kind = ParamDomain::Kind::Categorical;
    } else {
      throw ConfigError("config: unknown domain kind '" + kind + "'");
    }
    if (d.kind == ParamDomain::Kind::Categorical) {
      d.categories =
          require(dj, "values", "space").get<std::vector<std::string>>();
    } else {
      d.lo = require(dj, "lo", "space").get<double>();
      d.hi = require(dj, "hi", "space").get<double>();
      d.log_scale = dj.value("log", false);
    }
    space.domains.push_back(std::move(d));
  }
  return space;
}

ParamSet parse_param_set(const json& j) {
  return param_set_from_json(j.dump());
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }

  RunConfig cfg;
  cfg.config_json = j.dump();

  const json& process = require(j, "process", "<root>");
  cfg.process_kind = require(process, "kind", "process").get<std::string>();
  cfg.dt = process.value("dt", cfg.process_kind == "polystyrene" ? 0.001
                               : cfg.process_kind == "random_walk" ? 1.0
                                                                   : 0.01);
  if (process.contains("params")) {
    for (const auto& [name, value] : process.at("params").items()) {
      cfg.process_params.emplace_back(name, value.get<double>());
    }
  }

  if (j.contains("noise")) {
    cfg.noise.mean = j["noise"].value("mean", 0.0);
    cfg.noise.variance = require(j["noise"], "variance", "noise").get<double>();
  } else {
    cfg.noise.variance = cfg.process_kind == "polystyrene" ? 0.0014
                         : cfg.process_kind == "exothermic" ? 0.02
                                                            : 0.0;
  }

  if (j.contains("basins")) {
    const json& basins = j["basins"];
    cfg.basins.basin_a_bound =
        require(basins, "basin_a_bound", "basins").get<double>();
    cfg.basins.basin_b_bound =
        require(basins, "basin_b_bound", "basins").get<double>();
    const std::string dir = basins.value("direction", "decreasing");
    if (dir == "decreasing") {
      cfg.basins.direction = TransitionDirection::Decreasing;
    } else if (dir == "increasing") {
      cfg.basins.direction = TransitionDirection::Increasing;
    } else {
      throw ConfigError("config: basins.direction must be "
                        "'increasing' or 'decreasing'");
    }
  }

  if (j.contains("ladder")) {
    const json& ladder = j["ladder"];
    if (ladder.contains("values")) {
      cfg.ladder_values = ladder["values"].get<std::vector<double>>();
    }
    cfg.ladder_levels = ladder.value("levels", cfg.ladder_levels);
  }

  if (j.contains("response_action")) {
    const json& response = j["response_action"];
    cfg.response_name = require(response, "name", "response_action");
    cfg.response_values =
        require(response, "values", "response_action").get<std::vector<double>>();
    if (cfg.response_values.empty()) {
      throw ConfigError("config: response_action.values must be non-empty");
    }
  }

  if (j.contains("initial_flux")) {
    const json& flux = j["initial_flux"];
    cfg.initial_flux.target_count =
        flux.value("target_count", cfg.initial_flux.target_count);
    cfg.initial_flux.trajectory_time =
        flux.value("trajectory_time", cfg.initial_flux.trajectory_time);
    cfg.initial_flux.max_trajectories =
        flux.value("max_trajectories", cfg.initial_flux.max_trajectories);
  }

  if (j.contains("branching")) {
    const json& branching = j["branching"];
    const json& counts = require(branching, "branch_counts", "branching");
    if (counts.is_number()) {
      cfg.branching.branch_counts.assign(cfg.ladder_levels,
                                         counts.get<std::size_t>());
    } else {
      cfg.branching.branch_counts = counts.get<std::vector<std::size_t>>();
    }
    cfg.branching.seed_count =
        branching.value("seed_count", cfg.branching.seed_count);
    cfg.branching.max_branch_steps =
        branching.value("max_branch_steps", cfg.branching.max_branch_steps);
  }

  if (j.contains("filter")) {
    const json& filter = j["filter"];
    const json& factors = require(filter, "factors", "filter");
    if (factors.is_number()) {
      cfg.filter.factors = {factors.get<double>()};
    } else {
      cfg.filter.factors = factors.get<std::vector<double>>();
    }
  }

  if (j.contains("dataset")) {
    const json& dataset = j["dataset"];
    cfg.split.train_fraction =
        dataset.value("train_fraction", cfg.split.train_fraction);
    if (dataset.contains("features")) {
      cfg.feature_fields = dataset["features"].get<std::vector<std::string>>();
    }
    if (dataset.contains("csv")) {
      cfg.dataset_csv = dataset["csv"].get<std::string>();
      cfg.dataset_schema = require(dataset, "schema", "dataset");
    }
  }

  if (j.contains("models")) {
    for (const auto& mj : j["models"]) {
      ModelPlan plan;
      plan.kind = require(mj, "kind", "models").get<std::string>();
      if (mj.contains("params")) {
        plan.fixed_params = parse_param_set(mj["params"]);
      }
      if (mj.contains("space")) plan.space = parse_space(mj["space"]);
      cfg.models.push_back(std::move(plan));
    }
  }

  if (j.contains("search")) {
    const json& search = j["search"];
    cfg.search.budget = search.value("budget", cfg.search.budget);
    cfg.search.k_folds = search.value("k_folds", cfg.search.k_folds);
    cfg.search.grid_points = search.value("grid_points", cfg.search.grid_points);
    const std::string sampler = search.value("sampler", "random");
    if (sampler == "random") {
      cfg.search.sampler = SamplerKind::Random;
    } else if (sampler == "grid") {
      cfg.search.sampler = SamplerKind::Grid;
    } else {
      throw ConfigError("config: search.sampler must be 'random' or 'grid'");
    }
  }

  if (j.contains("alarms")) {
    cfg.alarms.thresholds =
        require(j["alarms"], "thresholds", "alarms").get<std::vector<double>>();
  }

  if (j.contains("deployment")) {
    const json& deploy = j["deployment"];
    cfg.deploy_n_sim = deploy.value("n_sim", cfg.deploy_n_sim);
    cfg.deploy_t_sim = deploy.value("t_sim", cfg.deploy_t_sim);
    cfg.deploy_call_freq = deploy.value("call_freq", cfg.deploy_call_freq);
    cfg.deploy_response_value =
        deploy.value("response_value", cfg.deploy_response_value);
    if (deploy.contains("initial_state")) {
      cfg.deploy_initial_state =
          deploy["initial_state"].get<std::vector<double>>();
    }
  } else if (!cfg.response_values.empty()) {
    cfg.deploy_response_value = cfg.response_values.front();
  }

  if (j.contains("weights")) {
    const auto values =
        require(j["weights"], "values", "weights").get<std::vector<double>>();
    if (values.size() != kNumMetrics) {
      throw ConfigError("config: weights.values needs 7 entries");
    }
    for (std::size_t i = 0; i < kNumMetrics; ++i) {
      cfg.weights.a[i] = values[i];
    }
  }
  if (j.contains("weight_sampling")) {
    const json& sampling = j["weight_sampling"];
    cfg.weight_samples = sampling.value("count", cfg.weight_samples);
    if (sampling.contains("bounds")) {
      const auto bounds =
          sampling["bounds"].get<std::vector<std::vector<double>>>();
      if (bounds.size() != kNumMetrics) {
        throw ConfigError("config: weight_sampling.bounds needs 7 entries");
      }
      for (std::size_t i = 0; i < kNumMetrics; ++i) {
        if (bounds[i].size() != 2) {
          throw ConfigError("config: each weight bound is [lo, hi]");
        }
        cfg.weight_bounds.bounds[i] = {bounds[i][0], bounds[i][1]};
      }
    }
  }

  if (j.contains("rank")) {
    cfg.rank_metrics_files =
        require(j["rank"], "metrics_files", "rank").get<std::vector<std::string>>();
  }

  if (j.contains("simulate")) {
    const json& sim = j["simulate"];
    cfg.simulate_t_sim = sim.value("t_sim", cfg.simulate_t_sim);
    cfg.simulate_stop_on_basin_b =
        sim.value("stop_on_basin_b", cfg.simulate_stop_on_basin_b);
  }

  cfg.master_seed = j.value("seed", 0ULL);
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_run_config(text);
}

std::unique_ptr<ProcessModel> RunConfig::make_process() const {
  std::unique_ptr<ProcessModel> model;
  if (process_kind == "exothermic") {
    model = std::make_unique<ExothermicCstr>();
  } else if (process_kind == "polystyrene") {
    model = std::make_unique<PolystyreneCstr>();
  } else if (process_kind == "random_walk") {
    model = std::make_unique<RandomWalk>();
  } else {
    throw ConfigError("config: unknown process kind '" + process_kind + "'");
  }
  for (const auto& [name, value] : process_params) {
    model->set_param(name, value);
  }
  return model;
}

InterfaceLadder RunConfig::make_ladder() const {
  if (ladder_values) {
    if (ladder_values->empty()) {
      throw ConfigError("config: ladder.values must be non-empty");
    }
    InterfaceLadder ladder;
    ladder.values = *ladder_values;
    ladder.direction = basins.direction;
    ladder.validate(basins);
    return ladder;
  }
  return InterfaceLadder::uniform(basins, ladder_levels);
}

DeploymentConfig RunConfig::make_deployment(std::size_t jobs) const {
  DeploymentConfig deploy;
  deploy.n_sim = deploy_n_sim;
  deploy.t_sim = deploy_t_sim;
  deploy.call_freq = deploy_call_freq;
  deploy.dt = dt;
  deploy.jobs = jobs;
  deploy.seeds.reserve(deploy.n_sim);
  for (std::size_t i = 0; i < deploy.n_sim; ++i) {
    deploy.seeds.push_back(derive_seed(master_seed, "deploy", i));
  }
  if (deploy_initial_state) {
    ProcessState state;
    state.y = *deploy_initial_state;
    deploy.initial_state = state;
  }
  return deploy;
}

}  // namespace fluxbench
