#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fluxbench/data/dataset.hpp"
#include "fluxbench/ffs/engine.hpp"

namespace fluxbench {

/// Per-interface committer filter. Within each (interface, response value)
/// group, rows are retained when |p_B - mean| <= c * population std; groups
/// of size one bypass the filter.
struct FilterConfig {
  std::vector<double> factors;  // c_0..c_n; a single entry applies everywhere

  void validate() const;
  double factor_for(std::size_t interface_index) const;
};

struct FilterStats {
  std::size_t input_rows = 0;
  std::size_t retained_rows = 0;
};

/// Returns the indices of retained records (into the concatenated forests).
std::vector<std::size_t> filter_by_interface(
    const std::vector<const FfsResult*>& results, const FilterConfig& config,
    FilterStats* stats = nullptr);

struct AssembleOptions {
  /// State fields used as features; empty means all state fields.
  std::vector<std::string> feature_fields;
  /// Admissible values of the response-action variable (the sweep list).
  std::vector<double> response_values;
};

/// One row per retained crossing: features are the saved state fields plus
/// the response-action value (a discrete column); p_B is the target.
TabularDataset assemble(const std::vector<const FfsResult*>& results,
                        const std::vector<std::size_t>& retained,
                        const ProcessModel& model,
                        const AssembleOptions& options);

struct SplitConfig {
  double train_fraction = 0.7;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainTestSplit {
  TabularDataset train;
  TabularDataset test;
};

TrainTestSplit train_test_split(const TabularDataset& data,
                                const SplitConfig& config);

/// Per-column standardization fitted on training data only; zero-variance
/// columns pass through unscaled.
class Scaler {
 public:
  static Scaler fit(const TabularDataset& train);
  static Scaler fit(const std::vector<double>& features, std::size_t n_cols);

  void apply_row(std::span<double> row) const;
  std::vector<double> apply(const std::vector<double>& features) const;
  TabularDataset apply(const TabularDataset& data) const;

  const std::vector<double>& means() const { return means_; }
  const std::vector<double>& stds() const { return stds_; }

 private:
  std::vector<double> means_;
  std::vector<double> stds_;  // 1.0 where the column variance is zero
};

/// Stable mapping of admissible values (ascending) to integer codes 0..K-1.
class DiscreteEncoder {
 public:
  DiscreteEncoder() = default;
  explicit DiscreteEncoder(std::vector<double> admissible_values);

  double encode(double value) const;  // throws UnknownCategory
  std::size_t cardinality() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

/// Feature preprocessing bound to a trained model: discrete columns are
/// integer-encoded for every model family; standardization applies only to
/// families that need scaled inputs.
class FeaturePipeline {
 public:
  FeaturePipeline() = default;
  FeaturePipeline(const TabularDataset& train, bool scale);

  /// Encoded (and optionally scaled) copy of a dataset's features.
  std::vector<double> transform(const TabularDataset& data) const;
  /// Transforms one raw feature row in place.
  void transform_row(std::span<double> row) const;

  bool scaled() const { return scale_; }

 private:
  std::vector<std::optional<DiscreteEncoder>> encoders_;
  Scaler scaler_;
  bool scale_ = false;
};

}  // namespace fluxbench
