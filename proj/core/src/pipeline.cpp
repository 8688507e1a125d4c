#include "fluxbench/data/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fluxbench/errors.hpp"
#include "fluxbench/rng.hpp"

namespace fluxbench {

void FilterConfig::validate() const {
  if (factors.empty()) throw ConfigError("filter: need at least one factor");
  for (double c : factors) {
    if (!(c > 0.0)) throw ConfigError("filter: factors must be > 0");
  }
}

double FilterConfig::factor_for(std::size_t interface_index) const {
  if (factors.size() == 1) return factors[0];
  if (interface_index >= factors.size()) {
    throw ConfigError("filter: no factor for interface " +
                      std::to_string(interface_index));
  }
  return factors[interface_index];
}

std::vector<std::size_t> filter_by_interface(
    const std::vector<const FfsResult*>& results, const FilterConfig& config,
    FilterStats* stats) {
  config.validate();

  struct Row {
    std::size_t flat_index;
    double p_b;
  };
  // Group key: (response sweep point, interface index).
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Row>> groups;
  std::size_t flat = 0;
  for (std::size_t r = 0; r < results.size(); ++r) {
    for (const CrossingRecord& rec : results[r]->forest) {
      if (!rec.p_b.has_value()) {
        throw RuntimeError("filter: committer probabilities not computed");
      }
      groups[{r, rec.interface_index}].push_back({flat, *rec.p_b});
      ++flat;
    }
  }

  std::vector<std::size_t> retained;
  for (auto& [key, rows] : groups) {
    if (rows.size() == 1) {  // sigma undefined; retain unconditionally
      retained.push_back(rows[0].flat_index);
      continue;
    }
    double sum = 0.0;
    for (const Row& row : rows) sum += row.p_b;
    const double mean = sum / static_cast<double>(rows.size());
    double ss = 0.0;
    for (const Row& row : rows) ss += (row.p_b - mean) * (row.p_b - mean);
    const double sigma = std::sqrt(ss / static_cast<double>(rows.size()));
    const double c = config.factor_for(key.second);
    const double lo = mean - c * sigma;
    const double hi = mean + c * sigma;
    for (const Row& row : rows) {
      if (row.p_b >= lo && row.p_b <= hi) retained.push_back(row.flat_index);
    }
  }
  std::sort(retained.begin(), retained.end());
  if (stats != nullptr) {
    stats->input_rows = flat;
    stats->retained_rows = retained.size();
  }
  return retained;
}

TabularDataset assemble(const std::vector<const FfsResult*>& results,
                        const std::vector<std::size_t>& retained,
                        const ProcessModel& model,
                        const AssembleOptions& options) {
  if (results.empty()) throw RuntimeError("assemble: no forests");
  std::size_t total = 0;
  for (const FfsResult* r : results) total += r->forest.size();
  if (total == 0) throw RuntimeError("assemble: empty forest");

  const auto state_names = model.state_names();
  std::vector<std::size_t> field_indices;
  if (options.feature_fields.empty()) {
    for (std::size_t i = 0; i < state_names.size(); ++i) {
      field_indices.push_back(i);
    }
  } else {
    for (const auto& name : options.feature_fields) {
      auto it = std::find(state_names.begin(), state_names.end(), name);
      if (it == state_names.end()) {
        throw ConfigError("assemble: unknown state field '" + name + "'");
      }
      field_indices.push_back(
          static_cast<std::size_t>(it - state_names.begin()));
    }
  }

  TabularDataset data;
  data.process_id = model.name();
  data.response_action = results.front()->response_name;
  for (std::size_t idx : field_indices) {
    ColumnMeta col;
    col.name = state_names[idx];
    col.kind = ColumnKind::Continuous;
    data.columns.push_back(std::move(col));
  }
  ColumnMeta response_col;
  response_col.name = data.response_action;
  response_col.kind = ColumnKind::Discrete;
  response_col.discrete_values = options.response_values;
  std::sort(response_col.discrete_values.begin(),
            response_col.discrete_values.end());
  data.columns.push_back(std::move(response_col));

  // Flat index -> record, mirroring filter_by_interface's ordering.
  std::vector<const CrossingRecord*> records;
  records.reserve(total);
  for (const FfsResult* r : results) {
    for (const CrossingRecord& rec : r->forest) records.push_back(&rec);
  }

  for (std::size_t flat : retained) {
    const CrossingRecord& rec = *records.at(flat);
    data.targets.push_back(rec.p_b.value());
    for (std::size_t idx : field_indices) {
      data.features.push_back(rec.state.y.at(idx));
    }
    data.features.push_back(rec.response_value);
  }
  data.validate();
  return data;
}

void SplitConfig::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("split: train_fraction must be in (0, 1)");
  }
}

TrainTestSplit train_test_split(const TabularDataset& data,
                                const SplitConfig& config) {
  config.validate();
  const std::size_t n = data.n_rows();
  if (n < 2) throw RuntimeError("split: need at least two rows");

  auto indices = shuffled_indices(n, derive_seed(config.seed, "split"));
  const auto n_train = static_cast<std::size_t>(
      std::llround(config.train_fraction * static_cast<double>(n)));
  const std::size_t n_train_clamped = std::clamp<std::size_t>(n_train, 1, n - 1);

  std::vector<std::size_t> train_idx(indices.begin(),
                                     indices.begin() + n_train_clamped);
  std::vector<std::size_t> test_idx(indices.begin() + n_train_clamped,
                                    indices.end());
  return {data.take(train_idx), data.take(test_idx)};
}

Scaler Scaler::fit(const TabularDataset& train) {
  return fit(train.features, train.n_cols());
}

Scaler Scaler::fit(const std::vector<double>& features, std::size_t n_cols) {
  if (n_cols == 0 || features.empty()) {
    throw RuntimeError("scaler: empty training data");
  }
  const std::size_t n_rows = features.size() / n_cols;
  Scaler s;
  s.means_.assign(n_cols, 0.0);
  s.stds_.assign(n_cols, 1.0);
  for (std::size_t r = 0; r < n_rows; ++r) {
    for (std::size_t c = 0; c < n_cols; ++c) {
      s.means_[c] += features[r * n_cols + c];
    }
  }
  for (double& m : s.means_) m /= static_cast<double>(n_rows);
  std::vector<double> ss(n_cols, 0.0);
  for (std::size_t r = 0; r < n_rows; ++r) {
    for (std::size_t c = 0; c < n_cols; ++c) {
      const double d = features[r * n_cols + c] - s.means_[c];
      ss[c] += d * d;
    }
  }
  for (std::size_t c = 0; c < n_cols; ++c) {
    const double var = ss[c] / static_cast<double>(n_rows);
    if (var > 0.0) {
      s.stds_[c] = std::sqrt(var);
    } else {
      s.means_[c] = 0.0;  // constant column passes through unscaled
      s.stds_[c] = 1.0;
    }
  }
  return s;
}

void Scaler::apply_row(std::span<double> row) const {
  for (std::size_t c = 0; c < row.size(); ++c) {
    row[c] = (row[c] - means_[c]) / stds_[c];
  }
}

std::vector<double> Scaler::apply(const std::vector<double>& features) const {
  std::vector<double> out = features;
  const std::size_t n_cols = means_.size();
  for (std::size_t r = 0; r * n_cols < out.size(); ++r) {
    apply_row({out.data() + r * n_cols, n_cols});
  }
  return out;
}

TabularDataset Scaler::apply(const TabularDataset& data) const {
  TabularDataset out = data;
  out.features = apply(data.features);
  return out;
}

DiscreteEncoder::DiscreteEncoder(std::vector<double> admissible_values)
    : values_(std::move(admissible_values)) {
  std::sort(values_.begin(), values_.end());
  values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
  if (values_.empty()) {
    throw ConfigError("encoder: admissible set must be non-empty");
  }
}

double DiscreteEncoder::encode(double value) const {
  auto it = std::find(values_.begin(), values_.end(), value);
  if (it == values_.end()) {
    throw UnknownCategory("encoder: value " + std::to_string(value) +
                          " outside the admissible set");
  }
  return static_cast<double>(it - values_.begin());
}

FeaturePipeline::FeaturePipeline(const TabularDataset& train, bool scale)
    : scale_(scale) {
  encoders_.resize(train.n_cols());
  for (std::size_t c = 0; c < train.n_cols(); ++c) {
    if (train.columns[c].kind == ColumnKind::Discrete) {
      encoders_[c] = DiscreteEncoder(train.columns[c].discrete_values);
    }
  }
  // Scaler statistics are fitted on the encoded training features.
  std::vector<double> encoded = train.features;
  const std::size_t n_cols = train.n_cols();
  for (std::size_t r = 0; r < train.n_rows(); ++r) {
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (encoders_[c]) {
        encoded[r * n_cols + c] = encoders_[c]->encode(encoded[r * n_cols + c]);
      }
    }
  }
  if (scale_) scaler_ = Scaler::fit(encoded, n_cols);
}

std::vector<double> FeaturePipeline::transform(
    const TabularDataset& data) const {
  std::vector<double> out = data.features;
  const std::size_t n_cols = data.n_cols();
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    transform_row({out.data() + r * n_cols, n_cols});
  }
  return out;
}

void FeaturePipeline::transform_row(std::span<double> row) const {
  for (std::size_t c = 0; c < row.size(); ++c) {
    if (encoders_[c]) row[c] = encoders_[c]->encode(row[c]);
  }
  if (scale_) scaler_.apply_row(row);
}

}  // namespace fluxbench
