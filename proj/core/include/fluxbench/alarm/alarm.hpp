#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fluxbench/process/model.hpp"

namespace fluxbench {

/// Ordered alarm levels on the predicted committer probability.
struct AlarmSpec {
  std::vector<double> thresholds = {0.2, 0.5};  // p_B,1 < ... < p_B,n

  void validate() const;
  std::size_t n_levels() const { return thresholds.size(); }
};

/// Expected escalation probability per level: p_B,k / p_B,k+1, with the last
/// level referenced to the terminal region where p_B = 1.
std::vector<double> theoretical_probs(const AlarmSpec& spec);

enum class EpisodeResolution {
  EscalatedToNext,
  Deactivated,
  ReachedTerminalBasin,
  SimEnded,
};

std::string to_string(EpisodeResolution r);

struct AlarmEpisode {
  std::size_t sim = 0;
  std::size_t level = 1;  // 1-based
  double t_activate = 0.0;
  EpisodeResolution resolution = EpisodeResolution::SimEnded;
  double t_resolve = 0.0;
};

struct DeploymentConfig {
  std::size_t n_sim = 50;
  double t_sim = 1000.0;
  std::size_t call_freq = 30;  // model invoked every call_freq steps
  double dt = 0.01;
  std::vector<std::uint64_t> seeds;  // one per simulation, shared across models
  std::optional<ProcessState> initial_state;  // defaults to the model's
  std::size_t jobs = 1;

  void validate() const;
};

struct CallRecord {
  double t = 0.0;
  double lambda = 0.0;
  double p_hat = 0.0;  // clamped to [0, 1]
};

struct DeploymentResult {
  std::vector<AlarmEpisode> episodes;  // merged in simulation order
  std::vector<std::vector<CallRecord>> calls;  // per simulation
  std::size_t diverged_sims = 0;
  std::size_t basin_b_entries = 0;
  double t_deploy_s = 0.0;  // prediction time over one dedicated simulation
};

/// Predicts p_B from the live process state; feature assembly belongs to the
/// callable so deployment timing covers it.
using StatePredictor = std::function<double(const ProcessState&)>;

/// Runs n_sim noisy simulations; every call_freq steps the predictor is
/// invoked, the prediction clamped to [0, 1], and the alarm state machine
/// advanced. Simulations stop early on basin-B entry. Prediction wall time
/// is measured over one extra dedicated simulation (response actions are
/// never applied, so the state path depends only on the seed).
DeploymentResult run_deployment(const ProcessModel& model,
                                const NoiseSpec& noise, const BasinSpec& basins,
                                const DeploymentConfig& config,
                                const AlarmSpec& spec,
                                const StatePredictor& predictor);

struct MeasuredProbs {
  std::vector<std::optional<double>> per_level;  // nullopt when undefined
  std::vector<std::size_t> activations;
  std::vector<std::size_t> escalations;
};

/// Escalations over activations per level, pooled across simulations;
/// levels with zero activations are flagged undefined.
MeasuredProbs measured_probs(const std::vector<AlarmEpisode>& episodes,
                             const AlarmSpec& spec);

/// Level-weighted sum of |theoretical - measured|.
double delta_p(const std::vector<double>& theoretical,
               const std::vector<double>& measured);

/// Same, skipping undefined levels; `undefined_levels` reports how many were
/// skipped.
double delta_p(const std::vector<double>& theoretical,
               const MeasuredProbs& measured, std::size_t* undefined_levels);

std::size_t total_alarms(const std::vector<AlarmEpisode>& episodes);

/// Episode log CSV: sim,level,t_activate,resolution,t_resolve.
void write_episodes_csv(const std::string& path,
                        const std::vector<AlarmEpisode>& episodes);

}  // namespace fluxbench
