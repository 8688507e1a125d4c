#include <doctest.h>

#include <cmath>

#include "fluxbench/alarm/alarm.hpp"
#include "fluxbench/errors.hpp"
#include "fluxbench/process/random_walk.hpp"
#include "walk_oracles.hpp"

using namespace fluxbench;
using fluxbench::testing::brute_force_committor;

namespace {

BasinSpec walk_basins() {
  BasinSpec b;
  b.basin_a_bound = 0.0;
  b.basin_b_bound = 20.0;
  b.direction = TransitionDirection::Increasing;
  return b;
}

/// Deployment driver with a prediction sequence scripted by call index.
DeploymentResult run_scripted(const std::vector<double>& sequence,
                              const AlarmSpec& spec) {
  RandomWalkParams params;
  params.up_probability = 0.5;
  const RandomWalk model(params);
  BasinSpec basins;
  basins.basin_a_bound = 0.0;
  basins.basin_b_bound = 1e18;  // never reached
  basins.direction = TransitionDirection::Increasing;

  DeploymentConfig config;
  config.n_sim = 1;
  config.t_sim = static_cast<double>(sequence.size());
  config.call_freq = 1;
  config.dt = 1.0;
  config.seeds = {1};

  std::size_t call = 0;
  const StatePredictor predictor = [&](const ProcessState&) mutable {
    return sequence[std::min(call++, sequence.size() - 1)];
  };
  auto result = run_deployment(model, NoiseSpec{}, basins, config, spec,
                               predictor);
  return result;
}

std::size_t count_level(const std::vector<AlarmEpisode>& eps, std::size_t lvl) {
  std::size_t n = 0;
  for (const auto& e : eps) {
    if (e.level == lvl) ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("theoretical escalation probabilities") {
  CHECK(theoretical_probs(AlarmSpec{{0.2, 0.5}}) ==
        std::vector<double>{0.4, 0.5});
  CHECK(theoretical_probs(AlarmSpec{{0.5}}) == std::vector<double>{0.5});
  const auto three = theoretical_probs(AlarmSpec{{0.25, 0.5, 0.75}});
  CHECK(three[0] == 0.5);
  CHECK(three[1] == 0.5 / 0.75);
  CHECK(three[2] == 0.75);
}

TEST_CASE("alarm spec validation") {
  CHECK_THROWS_AS(theoretical_probs(AlarmSpec{{0.5, 0.2}}), ConfigError);
  CHECK_THROWS_AS(theoretical_probs(AlarmSpec{{0.0, 0.5}}), ConfigError);
  CHECK_THROWS_AS(theoretical_probs(AlarmSpec{{}}), ConfigError);
}

TEST_CASE("a single rising excursion escalates level 1 into level 2") {
  const AlarmSpec spec{{0.2, 0.5}};
  const auto result = run_scripted({0.1, 0.3, 0.6}, spec);
  const auto& eps = result.episodes;
  CHECK(count_level(eps, 1) == 1);
  CHECK(count_level(eps, 2) == 1);
  for (const auto& e : eps) {
    if (e.level == 1) {
      CHECK(e.resolution == EpisodeResolution::EscalatedToNext);
    } else {
      CHECK(e.resolution == EpisodeResolution::SimEnded);
    }
  }
}

TEST_CASE("two separate excursions stay at level 1") {
  const AlarmSpec spec{{0.2, 0.5}};
  const auto result = run_scripted({0.1, 0.3, 0.1, 0.3, 0.1}, spec);
  const auto& eps = result.episodes;
  CHECK(count_level(eps, 1) == 2);
  CHECK(count_level(eps, 2) == 0);
  for (const auto& e : eps) {
    CHECK(e.resolution == EpisodeResolution::Deactivated);
  }
}

TEST_CASE("a jump across both thresholds escalates in one call") {
  const AlarmSpec spec{{0.2, 0.5}};
  const auto result = run_scripted({0.1, 0.9, 0.1}, spec);
  const auto& eps = result.episodes;
  REQUIRE(count_level(eps, 1) == 1);
  REQUIRE(count_level(eps, 2) == 1);
  for (const auto& e : eps) {
    if (e.level == 1) {
      CHECK(e.resolution == EpisodeResolution::EscalatedToNext);
    } else {
      CHECK(e.resolution == EpisodeResolution::Deactivated);
    }
  }
}

TEST_CASE("measured probabilities divide escalations by activations") {
  const AlarmSpec spec{{0.2, 0.5}};
  std::vector<AlarmEpisode> episodes;
  for (int i = 0; i < 10; ++i) {
    AlarmEpisode e;
    e.level = 1;
    e.resolution = i < 4 ? EpisodeResolution::EscalatedToNext
                         : EpisodeResolution::Deactivated;
    episodes.push_back(e);
  }
  const auto measured = measured_probs(episodes, spec);
  CHECK(measured.per_level[0].value() == 0.4);
  CHECK(!measured.per_level[1].has_value());  // zero level-2 activations

  std::size_t undefined = 0;
  const double dp = delta_p(theoretical_probs(spec), measured, &undefined);
  CHECK(undefined == 1);
  CHECK(dp == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("zero escalations measure zero") {
  const AlarmSpec spec{{0.2}};
  std::vector<AlarmEpisode> episodes(3);
  for (auto& e : episodes) {
    e.level = 1;
    e.resolution = EpisodeResolution::Deactivated;
  }
  const auto measured = measured_probs(episodes, spec);
  CHECK(measured.per_level[0].value() == 0.0);
}

TEST_CASE("last-level escalation means entering the terminal basin") {
  const AlarmSpec spec{{0.2, 0.5}};
  std::vector<AlarmEpisode> episodes;
  AlarmEpisode reached;
  reached.level = 2;
  reached.resolution = EpisodeResolution::ReachedTerminalBasin;
  AlarmEpisode ended;
  ended.level = 2;
  ended.resolution = EpisodeResolution::SimEnded;
  episodes.push_back(reached);
  episodes.push_back(ended);
  const auto measured = measured_probs(episodes, spec);
  CHECK(measured.per_level[1].value() == 0.5);
}

TEST_CASE("delta_p weighs higher levels more heavily") {
  CHECK(delta_p({0.4, 0.5}, {0.4, 0.5}) == 0.0);
  CHECK(delta_p({0.4, 0.5}, {0.5, 0.3}) ==
        doctest::Approx(0.5).epsilon(1e-12));
  // A lone deviation d at level 2 contributes 2d.
  CHECK(delta_p({0.4, 0.5}, {0.4, 0.5 + 0.1}) ==
        doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("total alarms counts every episode") {
  std::vector<AlarmEpisode> episodes(4);
  episodes[0].level = 1;
  episodes[1].level = 1;
  episodes[2].level = 1;
  episodes[3].level = 2;
  CHECK(total_alarms(episodes) == 4);
  CHECK(total_alarms({}) == 0);
}

TEST_CASE("escalations never exceed activations") {
  const AlarmSpec spec{{0.2, 0.5}};
  RngStream rng(55);
  std::vector<double> sequence;
  for (int i = 0; i < 400; ++i) sequence.push_back(rng.uniform01());
  const auto result = run_scripted(sequence, spec);
  const auto measured = measured_probs(result.episodes, spec);
  for (std::size_t k = 0; k < spec.n_levels(); ++k) {
    CHECK(measured.escalations[k] <= measured.activations[k]);
  }
  CHECK(total_alarms(result.episodes) ==
        measured.activations[0] + measured.activations[1]);
}

TEST_CASE("same seeds give the same state path for different models") {
  RandomWalkParams params;
  params.up_probability = 0.45;
  const RandomWalk model(params);
  const auto basins = walk_basins();

  DeploymentConfig config;
  config.n_sim = 3;
  config.t_sim = 500.0;
  config.call_freq = 10;
  config.dt = 1.0;
  config.seeds = {derive_seed(9, "deploy", 0), derive_seed(9, "deploy", 1),
                  derive_seed(9, "deploy", 2)};

  const AlarmSpec spec{{0.2, 0.5}};
  const StatePredictor low = [](const ProcessState&) { return 0.05; };
  const StatePredictor high = [](const ProcessState& s) {
    return s.y[0] / 10.0;
  };
  const auto a = run_deployment(model, NoiseSpec{}, basins, config, spec, low);
  const auto b = run_deployment(model, NoiseSpec{}, basins, config, spec, high);
  REQUIRE(a.calls.size() == b.calls.size());
  for (std::size_t sim = 0; sim < a.calls.size(); ++sim) {
    REQUIRE(a.calls[sim].size() == b.calls[sim].size());
    for (std::size_t i = 0; i < a.calls[sim].size(); ++i) {
      CHECK(a.calls[sim][i].lambda == b.calls[sim][i].lambda);
      CHECK(a.calls[sim][i].t == b.calls[sim][i].t);
    }
  }
}

TEST_CASE("deployment is deterministic and worker-count independent") {
  RandomWalkParams params;
  params.up_probability = 0.48;
  const RandomWalk model(params);
  const auto basins = walk_basins();

  DeploymentConfig config;
  config.n_sim = 4;
  config.t_sim = 2000.0;
  config.call_freq = 5;
  config.dt = 1.0;
  for (std::size_t i = 0; i < 4; ++i) {
    config.seeds.push_back(derive_seed(3, "deploy", i));
  }
  const AlarmSpec spec{{0.2, 0.5}};
  const StatePredictor predictor = [](const ProcessState& s) {
    return s.y[0] / 20.0;
  };

  auto serial = config;
  serial.jobs = 1;
  auto parallel = config;
  parallel.jobs = 4;
  const auto a = run_deployment(model, NoiseSpec{}, basins, serial, spec,
                                predictor);
  const auto b = run_deployment(model, NoiseSpec{}, basins, parallel, spec,
                                predictor);
  REQUIRE(a.episodes.size() == b.episodes.size());
  for (std::size_t i = 0; i < a.episodes.size(); ++i) {
    CHECK(a.episodes[i].sim == b.episodes[i].sim);
    CHECK(a.episodes[i].level == b.episodes[i].level);
    CHECK(a.episodes[i].t_activate == b.episodes[i].t_activate);
    CHECK(a.episodes[i].resolution == b.episodes[i].resolution);
  }
}

TEST_CASE("a perfect committer predictor approaches the theoretical ratios") {
  // Walk with basin B at 20; the predictor returns a brute-force committer
  // estimate per position, so escalation frequencies should approach the
  // threshold ratios as more simulations are pooled.
  RandomWalkParams params;
  params.up_probability = 0.45;
  const RandomWalk model(params);
  const auto basins = walk_basins();
  const AlarmSpec spec{{0.2, 0.5}};
  const auto theory = theoretical_probs(spec);

  std::vector<double> committor(21, 0.0);
  for (int pos = 1; pos < 20; ++pos) {
    committor[pos] = brute_force_committor(0.45, pos, 20, 20000, 1000 + pos);
  }
  committor[20] = 1.0;
  const StatePredictor oracle = [&](const ProcessState& s) {
    return committor[static_cast<std::size_t>(s.y[0])];
  };

  const auto deviation = [&](std::size_t n_sim) {
    DeploymentConfig config;
    config.n_sim = n_sim;
    config.t_sim = 30000.0;
    config.call_freq = 1;
    config.dt = 1.0;
    for (std::size_t i = 0; i < n_sim; ++i) {
      config.seeds.push_back(derive_seed(17, "deploy", i));
    }
    config.jobs = 4;
    const auto result =
        run_deployment(model, NoiseSpec{}, basins, config, spec, oracle);
    const auto measured = measured_probs(result.episodes, spec);
    double worst = 0.0;
    for (std::size_t k = 0; k < spec.n_levels(); ++k) {
      REQUIRE(measured.per_level[k].has_value());
      worst = std::max(worst, std::abs(*measured.per_level[k] - theory[k]));
    }
    return worst;
  };

  const double at_50 = deviation(50);
  const double at_200 = deviation(200);
  CHECK(at_200 <= at_50 + 0.1);
}
