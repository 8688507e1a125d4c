// Command-line front end: runs the simulation, sampling, dataset, tuning,
// benchmark and ranking stages from a single JSON config file.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fluxbench/bench/report.hpp"
#include "fluxbench/config/run_config.hpp"
#include "fluxbench/csv.hpp"
#include "fluxbench/data/dataset.hpp"
#include "fluxbench/data/pipeline.hpp"
#include "fluxbench/errors.hpp"
#include "fluxbench/ffs/engine.hpp"
#include "fluxbench/tune/search.hpp"
#include "fluxbench/version.hpp"

namespace fs = std::filesystem;
using namespace fluxbench;

namespace {

struct CliOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::size_t jobs = 1;
};

RunConfig load(const CliOptions& opts) {
  RunConfig cfg = load_run_config(opts.config_path);
  if (opts.seed) cfg.master_seed = *opts.seed;
  if (opts.out_dir) cfg.out_dir = *opts.out_dir;
  fs::create_directories(cfg.out_dir);
  return cfg;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (fs::path(cfg.out_dir) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw RuntimeError("cannot write " + path);
  f << text;
  if (text.empty() || text.back() != '\n') f << '\n';
}

std::vector<FfsResult> run_ffs_sweep(const RunConfig& cfg, std::size_t jobs) {
  if (cfg.response_name.empty()) {
    throw ConfigError("config: missing section 'response_action'");
  }
  const auto base_model = cfg.make_process();
  const InterfaceLadder ladder = cfg.make_ladder();

  BgffsOptions options;
  options.branching = cfg.branching;
  if (options.branching.branch_counts.empty()) {
    options.branching.branch_counts.assign(ladder.levels(), 10);
  }
  options.initial_flux = cfg.initial_flux;
  options.dt = cfg.dt;
  options.jobs = jobs;

  std::vector<FfsResult> results;
  results.reserve(cfg.response_values.size());
  for (std::size_t i = 0; i < cfg.response_values.size(); ++i) {
    const double value = cfg.response_values[i];
    auto model = base_model->clone();
    model->set_param(cfg.response_name, value);
    try {
      results.push_back(run_bgffs(*model, cfg.basins, ladder, options,
                                  cfg.noise,
                                  derive_seed(cfg.master_seed, "ffs", i),
                                  cfg.response_name, value));
    } catch (const InsufficientFlux& e) {
      throw InsufficientFlux(std::string(e.what()) + " (response value " +
                             csv::format_double(value) + ")");
    }
  }
  return results;
}

TabularDataset build_dataset(const RunConfig& cfg,
                             const std::vector<FfsResult>& results) {
  std::vector<const FfsResult*> ptrs;
  ptrs.reserve(results.size());
  for (const FfsResult& r : results) ptrs.push_back(&r);

  FilterStats stats;
  const auto retained = filter_by_interface(ptrs, cfg.filter, &stats);

  AssembleOptions options;
  options.feature_fields = cfg.feature_fields;
  options.response_values = cfg.response_values;
  const auto model = cfg.make_process();
  return assemble(ptrs, retained, *model, options);
}

/// Loads the dataset named in the config, or generates it via the sampling
/// pipeline (emitting the forest artifacts along the way).
TabularDataset obtain_dataset(const RunConfig& cfg, Manifest& manifest,
                              std::size_t jobs) {
  if (cfg.dataset_csv) {
    if (!cfg.dataset_schema) {
      throw ConfigError("config: dataset.schema required with dataset.csv");
    }
    return read_dataset_csv(*cfg.dataset_csv, *cfg.dataset_schema);
  }
  const auto results = run_ffs_sweep(cfg, jobs);
  std::vector<const FfsResult*> ptrs;
  for (const FfsResult& r : results) ptrs.push_back(&r);
  const auto model = cfg.make_process();
  export_forest_csv(out_path(cfg, "forest.csv"), *model, ptrs);
  write_text(out_path(cfg, "ffs_summary.json"), ffs_summary_json(ptrs));
  manifest.add_file("forest.csv");
  manifest.add_file("ffs_summary.json");

  TabularDataset data = build_dataset(cfg, results);
  write_dataset_csv(out_path(cfg, "dataset.csv"), data);
  write_dataset_schema(out_path(cfg, "dataset_schema.json"), data);
  manifest.add_file("dataset.csv");
  manifest.add_file("dataset_schema.json");
  return data;
}

int cmd_simulate(const CliOptions& opts) {
  const RunConfig cfg = load(opts);
  Manifest manifest(cfg.config_json, cfg.master_seed);
  const auto model = cfg.make_process();

  SimConfig sim;
  sim.dt = cfg.dt;
  sim.t_sim = cfg.simulate_t_sim;
  sim.seed = derive_seed(cfg.master_seed, "simulate");
  sim.stop_on_basin_b = cfg.simulate_stop_on_basin_b;
  const auto traj = simulate(*model, model->initial_state(), cfg.noise, sim,
                             cfg.simulate_stop_on_basin_b ? &cfg.basins
                                                          : nullptr);
  export_trajectory_csv(out_path(cfg, "trajectory.csv"), *model, traj);
  manifest.add_file("trajectory.csv");
  manifest.write(out_path(cfg, "manifest.json"));
  std::cout << "simulate: " << traj.size() << " states -> "
            << out_path(cfg, "trajectory.csv") << "\n";
  return 0;
}

int cmd_ffs(const CliOptions& opts) {
  const RunConfig cfg = load(opts);
  Manifest manifest(cfg.config_json, cfg.master_seed);
  const auto results = run_ffs_sweep(cfg, opts.jobs);
  std::vector<const FfsResult*> ptrs;
  for (const FfsResult& r : results) ptrs.push_back(&r);
  const auto model = cfg.make_process();
  export_forest_csv(out_path(cfg, "forest.csv"), *model, ptrs);
  write_text(out_path(cfg, "ffs_summary.json"), ffs_summary_json(ptrs));
  manifest.add_file("forest.csv");
  manifest.add_file("ffs_summary.json");
  manifest.write(out_path(cfg, "manifest.json"));
  for (const FfsResult& r : results) {
    std::cout << "ffs: " << cfg.response_name << "="
              << csv::format_double(r.response_value) << " r0=" << r.r0
              << " p=" << r.p_mean << " rate=" << r.r_mean << " crossings="
              << r.forest.size() << "\n";
  }
  return 0;
}

int cmd_dataset(const CliOptions& opts) {
  const RunConfig cfg = load(opts);
  Manifest manifest(cfg.config_json, cfg.master_seed);
  const TabularDataset data = obtain_dataset(cfg, manifest, opts.jobs);

  SplitConfig split_cfg = cfg.split;
  split_cfg.seed = derive_seed(cfg.master_seed, "split");
  const auto split = train_test_split(data, split_cfg);
  write_dataset_csv(out_path(cfg, "dataset_train.csv"), split.train);
  write_dataset_csv(out_path(cfg, "dataset_test.csv"), split.test);
  manifest.add_file("dataset_train.csv");
  manifest.add_file("dataset_test.csv");
  manifest.write(out_path(cfg, "manifest.json"));
  std::cout << "dataset: " << data.n_rows() << " rows ("
            << split.train.n_rows() << " train / " << split.test.n_rows()
            << " test) -> " << out_path(cfg, "dataset.csv") << "\n";
  return 0;
}

int cmd_tune(const CliOptions& opts) {
  const RunConfig cfg = load(opts);
  if (cfg.models.empty()) throw ConfigError("config: missing section 'models'");
  Manifest manifest(cfg.config_json, cfg.master_seed);
  const TabularDataset data = obtain_dataset(cfg, manifest, opts.jobs);

  SplitConfig split_cfg = cfg.split;
  split_cfg.seed = derive_seed(cfg.master_seed, "split");
  const auto split = train_test_split(data, split_cfg);

  SearchConfig search_cfg = cfg.search;
  search_cfg.seed = derive_seed(cfg.master_seed, "search");
  nlohmann::json best = nlohmann::json::object();
  for (const ModelPlan& plan : cfg.models) {
    const HyperparamSpace space =
        plan.space ? *plan.space : default_hyperparam_space(plan.kind);
    const SearchResult result = search(plan.kind, space, split.train, search_cfg);
    const std::string trials_file = "trials_" + plan.kind + ".csv";
    write_trials_csv(out_path(cfg, trials_file), result.trials);
    manifest.add_file(trials_file);
    manifest.add_number("t_hyper_s_" + plan.kind, result.t_hyper_s);
    best[plan.kind] = {
        {"params", nlohmann::json::parse(param_set_to_json(result.best_params))},
        {"mean_rmse", result.best_score},
        {"trial", result.best_trial},
    };
    std::cout << "tune: " << plan.kind << " best mean RMSE "
              << result.best_score << " (trial " << result.best_trial << ")\n";
  }
  write_text(out_path(cfg, "best_params.json"), best.dump(2));
  manifest.add_file("best_params.json");
  manifest.write(out_path(cfg, "manifest.json"));
  return 0;
}

int cmd_bench(const CliOptions& opts) {
  const RunConfig cfg = load(opts);
  if (cfg.models.empty()) throw ConfigError("config: missing section 'models'");
  Manifest manifest(cfg.config_json, cfg.master_seed);
  const TabularDataset data = obtain_dataset(cfg, manifest, opts.jobs);

  SplitConfig split_cfg = cfg.split;
  split_cfg.seed = derive_seed(cfg.master_seed, "split");
  const auto split = train_test_split(data, split_cfg);
  write_dataset_csv(out_path(cfg, "dataset_train.csv"), split.train);
  write_dataset_csv(out_path(cfg, "dataset_test.csv"), split.test);
  manifest.add_file("dataset_train.csv");
  manifest.add_file("dataset_test.csv");

  BenchSettings settings;
  settings.search = cfg.search;
  settings.alarms = cfg.alarms;
  settings.deployment = cfg.make_deployment(opts.jobs);
  settings.response_value = cfg.deploy_response_value;
  settings.weights = cfg.weights;
  settings.master_seed = cfg.master_seed;
  settings.jobs = opts.jobs;

  const auto process = cfg.make_process();
  auto deploy_process = process->clone();
  deploy_process->set_param(cfg.response_name.empty() ? "tau"
                                                      : cfg.response_name,
                            settings.response_value);

  const BenchOutcome outcome =
      run_benchmark(split.train, split.test, cfg.models, *deploy_process,
                    cfg.noise, cfg.basins, settings);

  for (const ModelOutcome& m : outcome.models) {
    const std::string trials_file = "trials_" + m.kind + ".csv";
    write_trials_csv(out_path(cfg, trials_file), m.search.trials);
    manifest.add_file(trials_file);
    const std::string model_file = "model_" + m.kind + ".json";
    write_text(out_path(cfg, model_file), m.model_json);
    manifest.add_file(model_file);
    const std::string episodes_file = "episodes_" + m.kind + ".csv";
    write_episodes_csv(out_path(cfg, episodes_file), m.episodes);
    manifest.add_file(episodes_file);
    manifest.add_number("t_hyper_s_" + m.kind, m.metrics[1]);
    manifest.add_number("t_train_s_" + m.kind, m.metrics[2]);
    manifest.add_number("t_test_s_" + m.kind, m.metrics[3]);
    manifest.add_number("t_deploy_s_" + m.kind, m.metrics[4]);
    if (m.delta_p_undefined_levels > 0) {
      manifest.add_note("delta_p_undefined_levels_" + m.kind,
                        std::to_string(m.delta_p_undefined_levels));
    }
    if (m.diverged_sims > 0) {
      manifest.add_note("diverged_sims_" + m.kind,
                        std::to_string(m.diverged_sims));
    }
  }
  for (const std::string& failure : outcome.failed_models) {
    manifest.add_note("model_failed", failure);
    std::cerr << "warning: " << failure << "\n";
  }

  write_metrics_csv(out_path(cfg, "metrics.csv"), outcome.metrics);
  write_metrics_csv(out_path(cfg, "metrics_scaled.csv"), outcome.scaled);
  write_costs_csv(out_path(cfg, "costs.csv"), outcome.metrics.models,
                  outcome.costs);
  write_ranking_csv(out_path(cfg, "ranking.csv"), outcome.ranking);
  manifest.add_file("metrics.csv");
  manifest.add_file("metrics_scaled.csv");
  manifest.add_file("costs.csv");
  manifest.add_file("ranking.csv");

  // Deployment seeds are shared across models; record them for the audit.
  nlohmann::json seeds = nlohmann::json::array();
  for (std::uint64_t s : settings.deployment.seeds) seeds.push_back(s);
  manifest.add_note("deployment_seeds", seeds.dump());
  manifest.write(out_path(cfg, "manifest.json"));

  std::cout << "bench: " << outcome.models.size() << " models on "
            << data.n_rows() << " rows -> " << cfg.out_dir << "\n";
  for (const auto& [model, rank] : outcome.ranking) {
    std::cout << "  rank " << rank << ": " << model << "\n";
  }
  return 0;
}

int cmd_rank(const CliOptions& opts) {
  const RunConfig cfg = load(opts);
  if (cfg.rank_metrics_files.empty()) {
    throw ConfigError("config: missing section 'rank'");
  }
  Manifest manifest(cfg.config_json, cfg.master_seed);

  std::vector<MetricTable> scaled;
  std::vector<std::map<std::string, double>> local_rankings;
  for (const std::string& path : cfg.rank_metrics_files) {
    const MetricTable raw = read_metrics_csv(path);
    MetricTable s = scale_metrics(raw);
    std::vector<double> costs;
    for (const MetricVector& row : s.rows) {
      costs.push_back(cost(row, cfg.weights));
    }
    local_rankings.push_back(rank_models(s.models, costs));
    scaled.push_back(std::move(s));
  }

  const auto average = average_local_ranking(local_rankings);
  write_ranking_csv(out_path(cfg, "average_ranking.csv"), average);
  manifest.add_file("average_ranking.csv");

  const auto weights = sample_weight_vectors(
      cfg.weight_bounds, cfg.weight_samples, derive_seed(cfg.master_seed,
                                                         "weight_vectors"));
  const auto global = global_ranking(scaled, weights);
  write_ranking_csv(out_path(cfg, "global_ranking.csv"), global);
  manifest.add_file("global_ranking.csv");
  manifest.write(out_path(cfg, "manifest.json"));

  std::cout << "rank: " << cfg.rank_metrics_files.size() << " datasets, "
            << weights.size() << " weight draws -> "
            << out_path(cfg, "global_ranking.csv") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rare-event committer benchmark pipeline"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CliOptions opts;
  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opts.config_path, "Run config (JSON)")
        ->required();
    cmd->add_option("--seed", opts.seed, "Master seed override");
    cmd->add_option("--out", opts.out_dir, "Output directory override");
    cmd->add_option("--jobs", opts.jobs, "Worker threads for simulations");
  };

  auto* simulate = app.add_subcommand("simulate", "Integrate one trajectory");
  auto* ffs = app.add_subcommand("ffs", "Interface-crossing sweep");
  auto* dataset = app.add_subcommand("dataset", "Filter and assemble the table");
  auto* tune = app.add_subcommand("tune", "Cross-validated search only");
  auto* bench = app.add_subcommand("bench", "Full benchmark pipeline");
  auto* rank = app.add_subcommand("rank", "Aggregate rankings across datasets");
  for (auto* cmd : {simulate, ffs, dataset, tune, bench, rank}) add_common(cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(opts);
    if (ffs->parsed()) return cmd_ffs(opts);
    if (dataset->parsed()) return cmd_dataset(opts);
    if (tune->parsed()) return cmd_tune(opts);
    if (bench->parsed()) return cmd_bench(opts);
    if (rank->parsed()) return cmd_rank(opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
