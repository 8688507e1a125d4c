#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fluxbench {

enum class ColumnKind { Continuous, Discrete };

struct ColumnMeta {
  std::string name;
  ColumnKind kind = ColumnKind::Continuous;
  std::string unit;
  /// Admissible values for discrete columns, ascending.
  std::vector<double> discrete_values;
};

/// Rows of (p_B, features) with per-column metadata. Immutable once
/// assembled; transformations return new datasets.
struct TabularDataset {
  std::vector<ColumnMeta> columns;
  std::vector<double> targets;   // p_B per row
  std::vector<double> features;  // row-major, columns.size() per row
  std::string process_id;
  std::string response_action;

  std::size_t n_rows() const { return targets.size(); }
  std::size_t n_cols() const { return columns.size(); }
  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * n_cols(), n_cols()};
  }
  double at(std::size_t row, std::size_t col) const {
    return features[row * n_cols() + col];
  }

  /// Checks shape, finiteness, p_B range and discrete-set membership.
  void validate() const;

  TabularDataset take(const std::vector<std::size_t>& row_indices) const;
};

/// Dataset file: first column p_B, remaining columns the feature names.
void write_dataset_csv(const std::string& path, const TabularDataset& data);
TabularDataset read_dataset_csv(const std::string& path,
                                const std::string& schema_path);

/// Sidecar schema: column kinds, discrete value sets, provenance.
void write_dataset_schema(const std::string& path, const TabularDataset& data);

}  // namespace fluxbench
