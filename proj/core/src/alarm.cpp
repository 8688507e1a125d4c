#include "fluxbench/alarm/alarm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "fluxbench/csv.hpp"
#include "fluxbench/errors.hpp"
#include "fluxbench/parallel.hpp"

namespace fluxbench {

void AlarmSpec::validate() const {
  if (thresholds.empty()) throw ConfigError("alarms: need at least one level");
  for (double t : thresholds) {
    if (!(t > 0.0 && t < 1.0)) {
      throw ConfigError("alarms: thresholds must lie in (0, 1)");
    }
  }
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > thresholds[i - 1])) {
      throw ConfigError("alarms: thresholds must be strictly increasing");
    }
  }
}

std::vector<double> theoretical_probs(const AlarmSpec& spec) {
  spec.validate();
  std::vector<double> out(spec.n_levels());
  for (std::size_t k = 0; k < spec.n_levels(); ++k) {
    const double next =
        k + 1 < spec.n_levels() ? spec.thresholds[k + 1] : 1.0;
    out[k] = spec.thresholds[k] / next;
  }
  return out;
}

std::string to_string(EpisodeResolution r) {
  switch (r) {
    case EpisodeResolution::EscalatedToNext:
      return "escalated";
    case EpisodeResolution::Deactivated:
      return "deactivated";
    case EpisodeResolution::ReachedTerminalBasin:
      return "reached_terminal_basin";
    case EpisodeResolution::SimEnded:
      return "sim_ended";
  }
  return "unknown";
}

void DeploymentConfig::validate() const {
  if (n_sim < 1) throw ConfigError("deployment: n_sim must be >= 1");
  if (call_freq < 1) throw ConfigError("deployment: call_freq must be >= 1");
  if (!(dt > 0.0)) throw ConfigError("deployment: dt must be > 0");
  if (!(t_sim >= dt)) throw ConfigError("deployment: t_sim must be >= dt");
  if (seeds.size() < n_sim) {
    throw ConfigError("deployment: need one seed per simulation");
  }
}

namespace {

struct LevelState {
  bool active = false;
  bool escalated = false;
  double t_activate = 0.0;
};

enum class CloseCause { Deactivated, BasinB, SimEnd };

struct SimOutput {
  std::vector<AlarmEpisode> episodes;
  std::vector<CallRecord> calls;
  bool diverged = false;
  bool entered_basin_b = false;
  double predict_seconds = 0.0;
};

class AlarmMachine {
 public:
  AlarmMachine(std::size_t sim, const AlarmSpec& spec,
               std::vector<AlarmEpisode>& episodes)
      : sim_(sim), spec_(spec), episodes_(episodes),
        levels_(spec.n_levels()) {}

  void on_call(double t, double p_hat) {
    const std::size_t n = spec_.n_levels();
    for (std::size_t k = 0; k < n; ++k) {
      const double thr = spec_.thresholds[k];
      LevelState& level = levels_[k];
      const bool above = p_hat >= thr;
      if (level.active && !above) {
        close_level(k, t, CloseCause::Deactivated);
      } else if (!level.active && above && prev_hat_ < thr) {
        level.active = true;
        level.escalated = false;
        level.t_activate = t;
        if (k > 0 && levels_[k - 1].active) {
          levels_[k - 1].escalated = true;
        }
      }
    }
    prev_hat_ = p_hat;
  }

  void finish(double t, bool basin_b) {
    for (std::size_t k = 0; k < spec_.n_levels(); ++k) {
      if (levels_[k].active) {
        close_level(k, t, basin_b ? CloseCause::BasinB : CloseCause::SimEnd);
      }
    }
  }

 private:
  void close_level(std::size_t k, double t, CloseCause cause) {
    LevelState& level = levels_[k];
    AlarmEpisode ep;
    ep.sim = sim_;
    ep.level = k + 1;
    ep.t_activate = level.t_activate;
    ep.t_resolve = t;
    const bool last = k + 1 == spec_.n_levels();
    if (last && cause == CloseCause::BasinB) {
      ep.resolution = EpisodeResolution::ReachedTerminalBasin;
    } else if (level.escalated) {
      ep.resolution = EpisodeResolution::EscalatedToNext;
    } else if (cause == CloseCause::Deactivated) {
      ep.resolution = EpisodeResolution::Deactivated;
    } else {
      ep.resolution = EpisodeResolution::SimEnded;
    }
    episodes_.push_back(ep);
    level.active = false;
    level.escalated = false;
  }

  std::size_t sim_;
  const AlarmSpec& spec_;
  std::vector<AlarmEpisode>& episodes_;
  std::vector<LevelState> levels_;
  double prev_hat_ = 0.0;  // below every threshold before the first call
};

SimOutput run_one_sim(const ProcessModel& model, const NoiseSpec& noise,
                      const BasinSpec& basins, const DeploymentConfig& config,
                      const AlarmSpec& spec, const StatePredictor& predictor,
                      std::size_t sim_index, bool time_predictions) {
  SimOutput out;
  AlarmMachine machine(sim_index, spec, out.episodes);
  RngStream rng(config.seeds[sim_index]);
  ProcessState state =
      config.initial_state ? *config.initial_state : model.initial_state();
  const auto n_steps =
      static_cast<std::size_t>(std::llround(config.t_sim / config.dt));

  try {
    bool basin_b = false;
    for (std::size_t step = 1; step <= n_steps; ++step) {
      model.step(state, noise, config.dt, rng);
      if (step % config.call_freq == 0) {
        double p_hat;
        if (time_predictions) {
          const auto t0 = std::chrono::steady_clock::now();
          p_hat = predictor(state);
          out.predict_seconds += std::chrono::duration<double>(
                                     std::chrono::steady_clock::now() - t0)
                                     .count();
        } else {
          p_hat = predictor(state);
        }
        p_hat = std::clamp(p_hat, 0.0, 1.0);
        machine.on_call(state.t, p_hat);
        out.calls.push_back(
            CallRecord{state.t, model.order_parameter(state), p_hat});
      }
      if (basins.classify(model.order_parameter(state)) == Basin::B) {
        basin_b = true;
        break;
      }
    }
    machine.finish(state.t, basin_b);
    out.entered_basin_b = basin_b;
  } catch (const SimulationDiverged&) {
    out.diverged = true;
    out.episodes.clear();
    out.calls.clear();
  }
  return out;
}

}  // namespace

DeploymentResult run_deployment(const ProcessModel& model,
                                const NoiseSpec& noise, const BasinSpec& basins,
                                const DeploymentConfig& config,
                                const AlarmSpec& spec,
                                const StatePredictor& predictor) {
  config.validate();
  spec.validate();
  basins.validate();

  DeploymentResult result;
  std::vector<SimOutput> outputs(config.n_sim);
  parallel_for(config.n_sim, config.jobs, [&](std::size_t i) {
    outputs[i] =
        run_one_sim(model, noise, basins, config, spec, predictor, i, false);
  });
  for (std::size_t i = 0; i < config.n_sim; ++i) {
    SimOutput& out = outputs[i];
    if (out.diverged) {
      ++result.diverged_sims;
      result.calls.emplace_back();
      continue;
    }
    result.episodes.insert(result.episodes.end(), out.episodes.begin(),
                           out.episodes.end());
    result.calls.push_back(std::move(out.calls));
    if (out.entered_basin_b) ++result.basin_b_entries;
  }

  // Dedicated single simulation for the deployment-time metric; runs
  // sequentially so the timing is stable.
  SimOutput timed =
      run_one_sim(model, noise, basins, config, spec, predictor, 0, true);
  result.t_deploy_s = timed.predict_seconds;
  return result;
}

MeasuredProbs measured_probs(const std::vector<AlarmEpisode>& episodes,
                             const AlarmSpec& spec) {
  MeasuredProbs out;
  const std::size_t n = spec.n_levels();
  out.activations.assign(n, 0);
  out.escalations.assign(n, 0);
  out.per_level.assign(n, std::nullopt);
  for (const AlarmEpisode& ep : episodes) {
    const std::size_t k = ep.level - 1;
    ++out.activations[k];
    const bool last = ep.level == n;
    const bool escalated =
        last ? ep.resolution == EpisodeResolution::ReachedTerminalBasin
             : ep.resolution == EpisodeResolution::EscalatedToNext;
    if (escalated) ++out.escalations[k];
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (out.activations[k] > 0) {
      out.per_level[k] = static_cast<double>(out.escalations[k]) /
                         static_cast<double>(out.activations[k]);
    }
  }
  return out;
}

double delta_p(const std::vector<double>& theoretical,
               const std::vector<double>& measured) {
  if (theoretical.size() != measured.size()) {
    throw RuntimeError("delta_p: level count mismatch");
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < theoretical.size(); ++k) {
    acc += static_cast<double>(k + 1) * std::abs(theoretical[k] - measured[k]);
  }
  return acc;
}

double delta_p(const std::vector<double>& theoretical,
               const MeasuredProbs& measured, std::size_t* undefined_levels) {
  if (theoretical.size() != measured.per_level.size()) {
    throw RuntimeError("delta_p: level count mismatch");
  }
  double acc = 0.0;
  std::size_t undefined = 0;
  for (std::size_t k = 0; k < theoretical.size(); ++k) {
    if (!measured.per_level[k].has_value()) {
      ++undefined;
      continue;
    }
    acc += static_cast<double>(k + 1) *
           std::abs(theoretical[k] - *measured.per_level[k]);
  }
  if (undefined_levels != nullptr) *undefined_levels = undefined;
  return acc;
}

std::size_t total_alarms(const std::vector<AlarmEpisode>& episodes) {
  return episodes.size();
}

void write_episodes_csv(const std::string& path,
                        const std::vector<AlarmEpisode>& episodes) {
  csv::Table table;
  table.header = {"sim", "level", "t_activate", "resolution", "t_resolve"};
  for (const AlarmEpisode& ep : episodes) {
    table.rows.push_back({std::to_string(ep.sim), std::to_string(ep.level),
                          csv::format_double(ep.t_activate),
                          to_string(ep.resolution),
                          csv::format_double(ep.t_resolve)});
  }
  csv::write_file(path, table);
}

}  // namespace fluxbench
