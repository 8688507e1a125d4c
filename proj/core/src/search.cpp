#include "fluxbench/tune/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "fluxbench/bench/metrics.hpp"
#include "fluxbench/csv.hpp"
#include "fluxbench/data/pipeline.hpp"
#include "fluxbench/errors.hpp"
#include "fluxbench/rng.hpp"

namespace fluxbench {

void SearchConfig::validate() const {
  if (budget < 1) throw ConfigError("search: budget must be >= 1");
  if (k_folds < 2) throw ConfigError("search: k_folds must be >= 2");
  if (grid_points < 2) throw ConfigError("search: grid_points must be >= 2");
}

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n_rows,
                                                  std::size_t k,
                                                  std::uint64_t seed) {
  if (k < 2) throw ConfigError("kfold: k must be >= 2");
  if (n_rows < k) {
    throw RuntimeError("kfold: fewer rows than folds (" +
                       std::to_string(n_rows) + " < " + std::to_string(k) +
                       ")");
  }
  const auto order = shuffled_indices(n_rows, derive_seed(seed, "kfold"));
  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t i = 0; i < n_rows; ++i) {
    folds[i % k].push_back(order[i]);
  }
  return folds;
}

double cross_validate(const std::string& kind, const ParamSet& params,
                      const TabularDataset& train,
                      const std::vector<std::vector<std::size_t>>& folds) {
  const std::size_t k = folds.size();
  double score_sum = 0.0;
  for (std::size_t held_out = 0; held_out < k; ++held_out) {
    std::vector<std::size_t> fit_rows;
    for (std::size_t f = 0; f < k; ++f) {
      if (f == held_out) continue;
      fit_rows.insert(fit_rows.end(), folds[f].begin(), folds[f].end());
    }
    const TabularDataset fit_data = train.take(fit_rows);
    const TabularDataset val_data = train.take(folds[held_out]);
    try {
      auto model = make_regressor(kind, params);
      const FeaturePipeline pipeline(fit_data, model->needs_scaling());
      Matrix fit_x(fit_data.n_rows(), fit_data.n_cols(),
                   pipeline.transform(fit_data));
      model->fit(fit_x, fit_data.targets);
      Matrix val_x(val_data.n_rows(), val_data.n_cols(),
                   pipeline.transform(val_data));
      score_sum += rmse(model->predict(val_x), val_data.targets);
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return score_sum / static_cast<double>(k);
}

ParamSet sample_params(const HyperparamSpace& space, RngStream& rng) {
  ParamSet out;
  for (const ParamDomain& d : space.domains) {
    switch (d.kind) {
      case ParamDomain::Kind::Integer: {
        const auto lo = static_cast<std::int64_t>(d.lo);
        const auto hi = static_cast<std::int64_t>(d.hi);
        out[d.name] =
            lo + static_cast<std::int64_t>(
                     rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
        break;
      }
      case ParamDomain::Kind::Real: {
        if (d.log_scale) {
          const double u = rng.uniform(std::log(d.lo), std::log(d.hi));
          out[d.name] = std::exp(u);
        } else {
          out[d.name] = rng.uniform(d.lo, d.hi);
        }
        break;
      }
      case ParamDomain::Kind::Categorical: {
        out[d.name] = d.categories[static_cast<std::size_t>(
            rng.below(d.categories.size()))];
        break;
      }
    }
  }
  return out;
}

namespace {

std::vector<std::vector<ParamValue>> domain_grids(const HyperparamSpace& space,
                                                  std::size_t grid_points) {
  std::vector<std::vector<ParamValue>> grids;
  for (const ParamDomain& d : space.domains) {
    std::vector<ParamValue> values;
    switch (d.kind) {
      case ParamDomain::Kind::Integer: {
        const auto lo = static_cast<std::int64_t>(d.lo);
        const auto hi = static_cast<std::int64_t>(d.hi);
        const auto span = static_cast<std::size_t>(hi - lo);
        if (span + 1 <= grid_points) {
          for (std::int64_t v = lo; v <= hi; ++v) values.emplace_back(v);
        } else {
          for (std::size_t i = 0; i < grid_points; ++i) {
            const double frac = static_cast<double>(i) /
                                static_cast<double>(grid_points - 1);
            values.emplace_back(static_cast<std::int64_t>(
                std::llround(d.lo + frac * (d.hi - d.lo))));
          }
        }
        break;
      }
      case ParamDomain::Kind::Real: {
        for (std::size_t i = 0; i < grid_points; ++i) {
          const double frac =
              static_cast<double>(i) / static_cast<double>(grid_points - 1);
          if (d.log_scale) {
            values.emplace_back(std::exp(std::log(d.lo) +
                                         frac * (std::log(d.hi) - std::log(d.lo))));
          } else {
            values.emplace_back(d.lo + frac * (d.hi - d.lo));
          }
        }
        break;
      }
      case ParamDomain::Kind::Categorical: {
        for (const std::string& c : d.categories) values.emplace_back(c);
        break;
      }
    }
    grids.push_back(std::move(values));
  }
  return grids;
}

std::vector<ParamSet> plan_trials(const std::string& kind,
                                  const HyperparamSpace& space,
                                  const SearchConfig& config) {
  std::vector<ParamSet> plans;
  if (space.domains.empty()) {
    plans.emplace_back();  // nothing to tune; single default trial
    return plans;
  }
  if (config.sampler == SamplerKind::Random) {
    RngStream rng(derive_seed(config.seed, "search:" + kind));
    for (std::size_t i = 0; i < config.budget; ++i) {
      plans.push_back(sample_params(space, rng));
    }
    return plans;
  }
  // Grid: Cartesian product in domain order, truncated at the budget.
  const auto grids = domain_grids(space, config.grid_points);
  std::vector<std::size_t> idx(grids.size(), 0);
  while (plans.size() < config.budget) {
    ParamSet set;
    for (std::size_t d = 0; d < grids.size(); ++d) {
      set[space.domains[d].name] = grids[d][idx[d]];
    }
    plans.push_back(std::move(set));
    std::size_t d = grids.size();
    while (d-- > 0) {
      if (++idx[d] < grids[d].size()) break;
      idx[d] = 0;
      if (d == 0) return plans;  // full grid exhausted
    }
  }
  return plans;
}

}  // namespace

SearchResult search(const std::string& kind, const HyperparamSpace& space,
                    const TabularDataset& train, const SearchConfig& config) {
  config.validate();
  space.validate();
  const auto folds = kfold_split(train.n_rows(), config.k_folds,
                                 derive_seed(config.seed, "folds:" + kind));

  const auto t_start = std::chrono::steady_clock::now();
  SearchResult result;
  const auto plans = plan_trials(kind, space, config);
  result.trials.reserve(plans.size());
  for (std::size_t i = 0; i < plans.size(); ++i) {
    Trial trial;
    trial.index = i;
    trial.params = plans[i];
    const auto trial_start = std::chrono::steady_clock::now();
    trial.mean_rmse = cross_validate(kind, trial.params, train, folds);
    trial.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      trial_start)
            .count();
    result.trials.push_back(std::move(trial));
  }

  bool any_finite = false;
  for (const Trial& trial : result.trials) {
    if (!std::isfinite(trial.mean_rmse)) continue;
    any_finite = true;
    if (trial.mean_rmse < result.best_score) {
      result.best_score = trial.mean_rmse;
      result.best_trial = trial.index;
      result.best_params = trial.params;
    }
  }
  if (!any_finite) {
    throw RuntimeError("search: every trial failed for model '" + kind + "'");
  }
  result.t_hyper_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return result;
}

void write_trials_csv(const std::string& path,
                      const std::vector<Trial>& trials) {
  csv::Table table;
  table.header = {"trial", "params_json", "mean_rmse", "wall_time_s"};
  for (const Trial& t : trials) {
    table.rows.push_back({std::to_string(t.index),
                          param_set_to_json(t.params),
                          csv::format_double(t.mean_rmse),
                          csv::format_double(t.wall_time_s)});
  }
  csv::write_file(path, table);
}

}  // namespace fluxbench
