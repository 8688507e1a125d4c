#include "fluxbench/bench/report.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>

#include <nlohmann/json.hpp>

#include "fluxbench/csv.hpp"
#include "fluxbench/errors.hpp"
#include "fluxbench/rng.hpp"
#include "fluxbench/version.hpp"

namespace fluxbench {

StatePredictor make_state_predictor(const Regressor& model,
                                    const FeaturePipeline& pipeline,
                                    const TabularDataset& train,
                                    const ProcessModel& process,
                                    double response_value) {
  // Map dataset feature columns back onto state fields; the response-action
  // column is the trailing one by construction.
  const auto state_names = process.state_names();
  std::vector<std::size_t> field_indices;
  for (std::size_t c = 0; c + 1 < train.n_cols(); ++c) {
    auto it = std::find(state_names.begin(), state_names.end(),
                        train.columns[c].name);
    if (it == state_names.end()) {
      throw RuntimeError("predictor: dataset column '" + train.columns[c].name +
                         "' is not a state field");
    }
    field_indices.push_back(static_cast<std::size_t>(it - state_names.begin()));
  }

  return [&model, pipeline, field_indices,
          response_value](const ProcessState& state) {
    std::vector<double> row;
    row.reserve(field_indices.size() + 1);
    for (std::size_t idx : field_indices) row.push_back(state.y[idx]);
    row.push_back(response_value);
    pipeline.transform_row(row);
    return model.predict_row(row);
  };
}

BenchOutcome run_benchmark(const TabularDataset& train,
                           const TabularDataset& test,
                           const std::vector<ModelPlan>& plans,
                           const ProcessModel& model, const NoiseSpec& noise,
                           const BasinSpec& basins,
                           const BenchSettings& settings) {
  if (plans.empty()) throw ConfigError("bench: no models configured");
  const auto theoretical = theoretical_probs(settings.alarms);

  BenchOutcome outcome;
  for (const ModelPlan& plan : plans) {
    ModelOutcome result;
    result.kind = plan.kind;
    try {
      const HyperparamSpace space =
          plan.space ? *plan.space : default_hyperparam_space(plan.kind);

      // Hyperparameter search (metric 2 is timed inside).
      SearchConfig search_cfg = settings.search;
      search_cfg.seed = derive_seed(settings.master_seed, "search");
      result.search = search(plan.kind, space, train, search_cfg);

      ParamSet best = result.search.best_params;
      for (const auto& [name, value] : plan.fixed_params) best[name] = value;

      // Final training on the whole training set (metric 3).
      auto regressor = make_regressor(plan.kind, best);
      const FeaturePipeline pipeline(train, regressor->needs_scaling());
      Matrix train_x(train.n_rows(), train.n_cols(), pipeline.transform(train));
      const auto t_train_start = std::chrono::steady_clock::now();
      regressor->fit(train_x, train.targets);
      const double t_train =
          std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                        t_train_start)
              .count();

      // Test predictions (metric 4) and accuracy (metric 1).
      Matrix test_x(test.n_rows(), test.n_cols(), pipeline.transform(test));
      const auto t_test_start = std::chrono::steady_clock::now();
      const auto predictions = regressor->predict(test_x);
      const double t_test =
          std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                        t_test_start)
              .count();
      const double test_rmse = rmse(predictions, test.targets);

      // Live deployment (metrics 5-7) with the shared seed list.
      DeploymentConfig deploy = settings.deployment;
      deploy.jobs = settings.jobs;
      const auto predictor = make_state_predictor(
          *regressor, pipeline, train, model, settings.response_value);
      const auto deployment = run_deployment(model, noise, basins, deploy,
                                             settings.alarms, predictor);
      const auto measured = measured_probs(deployment.episodes, settings.alarms);
      std::size_t undefined = 0;
      const double dp = delta_p(theoretical, measured, &undefined);

      result.metrics[0] = test_rmse;
      result.metrics[1] = result.search.t_hyper_s;
      result.metrics[2] = t_train;
      result.metrics[3] = t_test;
      result.metrics[4] = deployment.t_deploy_s;
      result.metrics[5] = dp;
      result.metrics[6] = static_cast<double>(total_alarms(deployment.episodes));
      result.episodes = deployment.episodes;
      result.delta_p_undefined_levels = undefined;
      result.diverged_sims = deployment.diverged_sims;
      result.basin_b_entries = deployment.basin_b_entries;
      result.model_json = regressor->serialize();
      outcome.models.push_back(std::move(result));
    } catch (const std::exception& e) {
      outcome.failed_models.push_back(plan.kind + ": " + e.what());
    }
  }
  if (outcome.models.empty()) {
    throw RuntimeError("bench: every model failed");
  }

  for (const ModelOutcome& m : outcome.models) {
    outcome.metrics.models.push_back(m.kind);
    outcome.metrics.rows.push_back(m.metrics);
  }
  outcome.scaled = scale_metrics(outcome.metrics);
  outcome.costs.reserve(outcome.models.size());
  for (const MetricVector& row : outcome.scaled.rows) {
    outcome.costs.push_back(cost(row, settings.weights));
  }
  outcome.ranking = rank_models(outcome.metrics.models, outcome.costs);
  return outcome;
}

void write_metrics_csv(const std::string& path, const MetricTable& table) {
  csv::Table out;
  out.header.push_back("model");
  for (const char* name : kMetricNames) out.header.emplace_back(name);
  for (std::size_t i = 0; i < table.models.size(); ++i) {
    std::vector<std::string> row{table.models[i]};
    for (std::size_t m = 0; m < kNumMetrics; ++m) {
      row.push_back(csv::format_double(table.rows[i][m]));
    }
    out.rows.push_back(std::move(row));
  }
  csv::write_file(path, out);
}

MetricTable read_metrics_csv(const std::string& path) {
  const csv::Table in = csv::read_file(path);
  if (in.header.size() != kNumMetrics + 1 || in.header[0] != "model") {
    throw RuntimeError("metrics csv: unexpected header in " + path);
  }
  for (std::size_t m = 0; m < kNumMetrics; ++m) {
    if (in.header[m + 1] != kMetricNames[m]) {
      throw RuntimeError("metrics csv: unexpected column '" + in.header[m + 1] +
                         "'");
    }
  }
  MetricTable table;
  for (const auto& row : in.rows) {
    if (row.size() != kNumMetrics + 1) {
      throw RuntimeError("metrics csv: ragged row in " + path);
    }
    table.models.push_back(row[0]);
    MetricVector v;
    for (std::size_t m = 0; m < kNumMetrics; ++m) {
      v[m] = csv::parse_double(row[m + 1]);
    }
    table.rows.push_back(v);
  }
  return table;
}

void write_costs_csv(const std::string& path,
                     const std::vector<std::string>& models,
                     const std::vector<double>& costs) {
  csv::Table out;
  out.header = {"model", "cost"};
  for (std::size_t i = 0; i < models.size(); ++i) {
    out.rows.push_back({models[i], csv::format_double(costs[i])});
  }
  csv::write_file(path, out);
}

void write_ranking_csv(const std::string& path,
                       const std::map<std::string, double>& ranking) {
  // Ascending by rank value, model name breaking ties.
  std::vector<std::pair<std::string, double>> entries(ranking.begin(),
                                                      ranking.end());
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) {
                     return a.second < b.second;
                   });
  csv::Table out;
  out.header = {"model", "rank"};
  for (const auto& [model, rank] : entries) {
    out.rows.push_back({model, csv::format_double(rank)});
  }
  csv::write_file(path, out);
}

Manifest::Manifest(std::string config_json, std::uint64_t master_seed)
    : config_json_(std::move(config_json)), master_seed_(master_seed) {}

void Manifest::add_file(const std::string& path) { files_.push_back(path); }

void Manifest::add_note(const std::string& key, const std::string& value) {
  notes_.emplace_back(key, value);
}

void Manifest::add_number(const std::string& key, double value) {
  numbers_.emplace_back(key, value);
}

void Manifest::write(const std::string& path) const {
  nlohmann::json files = nlohmann::json::array();
  for (const std::string& f : files_) files.push_back(f);
  nlohmann::json notes = nlohmann::json::object();
  for (const auto& [k, v] : notes_) notes[k] = v;
  nlohmann::json numbers = nlohmann::json::object();
  for (const auto& [k, v] : numbers_) numbers[k] = v;
  const nlohmann::json out = {
      {"tool_version", kVersion},
      {"config_hash", hash_label(config_json_)},
      {"master_seed", master_seed_},
      {"files", std::move(files)},
      {"notes", std::move(notes)},
      {"timings", std::move(numbers)},
  };
  std::ofstream f(path);
  if (!f) throw RuntimeError("cannot write manifest to " + path);
  f << out.dump(2) << '\n';
}

}  // namespace fluxbench
