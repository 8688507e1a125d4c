#include "fluxbench/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "fluxbench/csv.hpp"
#include "fluxbench/errors.hpp"

namespace fluxbench {

void TabularDataset::validate() const {
  if (features.size() != n_rows() * n_cols()) {
    throw RuntimeError("dataset: feature storage does not match shape");
  }
  for (double p : targets) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw RuntimeError("dataset: p_B outside [0, 1]");
    }
  }
  for (double v : features) {
    if (!std::isfinite(v)) throw RuntimeError("dataset: non-finite feature");
  }
  for (std::size_t c = 0; c < n_cols(); ++c) {
    if (columns[c].kind != ColumnKind::Discrete) continue;
    const auto& admissible = columns[c].discrete_values;
    for (std::size_t r = 0; r < n_rows(); ++r) {
      if (std::find(admissible.begin(), admissible.end(), at(r, c)) ==
          admissible.end()) {
        throw UnknownCategory("dataset: value outside the admissible set of " +
                              columns[c].name);
      }
    }
  }
}

TabularDataset TabularDataset::take(
    const std::vector<std::size_t>& row_indices) const {
  TabularDataset out;
  out.columns = columns;
  out.process_id = process_id;
  out.response_action = response_action;
  out.targets.reserve(row_indices.size());
  out.features.reserve(row_indices.size() * n_cols());
  for (std::size_t r : row_indices) {
    out.targets.push_back(targets[r]);
    const auto row_span = row(r);
    out.features.insert(out.features.end(), row_span.begin(), row_span.end());
  }
  return out;
}

void write_dataset_csv(const std::string& path, const TabularDataset& data) {
  csv::Table table;
  table.header.push_back("p_B");
  for (const auto& col : data.columns) table.header.push_back(col.name);
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    std::vector<std::string> row;
    row.push_back(csv::format_double(data.targets[r]));
    for (double v : data.row(r)) row.push_back(csv::format_double(v));
    table.rows.push_back(std::move(row));
  }
  csv::write_file(path, table);
}

void write_dataset_schema(const std::string& path,
                          const TabularDataset& data) {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& col : data.columns) {
    nlohmann::json j = {
        {"name", col.name},
        {"kind", col.kind == ColumnKind::Discrete ? "discrete" : "continuous"},
        {"unit", col.unit},
    };
    if (col.kind == ColumnKind::Discrete) {
      j["values"] = col.discrete_values;
    }
    cols.push_back(std::move(j));
  }
  nlohmann::json out = {
      {"target", "p_B"},
      {"columns", std::move(cols)},
      {"process", data.process_id},
      {"response_action", data.response_action},
  };
  std::ofstream f(path);
  if (!f) throw RuntimeError("cannot write schema to " + path);
  f << out.dump(2) << '\n';
}

TabularDataset read_dataset_csv(const std::string& path,
                                const std::string& schema_path) {
  std::ifstream sf(schema_path);
  if (!sf) throw RuntimeError("cannot open schema " + schema_path);
  nlohmann::json schema = nlohmann::json::parse(sf);

  TabularDataset data;
  data.process_id = schema.value("process", "");
  data.response_action = schema.value("response_action", "");
  for (const auto& j : schema.at("columns")) {
    ColumnMeta col;
    col.name = j.at("name").get<std::string>();
    col.kind = j.at("kind").get<std::string>() == "discrete"
                   ? ColumnKind::Discrete
                   : ColumnKind::Continuous;
    col.unit = j.value("unit", "");
    if (col.kind == ColumnKind::Discrete) {
      col.discrete_values = j.at("values").get<std::vector<double>>();
    }
    data.columns.push_back(std::move(col));
  }

  const csv::Table table = csv::read_file(path);
  if (table.header.empty() || table.header[0] != "p_B") {
    throw RuntimeError("dataset csv: first column must be p_B");
  }
  if (table.header.size() != data.columns.size() + 1) {
    throw RuntimeError("dataset csv: header does not match schema");
  }
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) {
      throw RuntimeError("dataset csv: ragged row");
    }
    data.targets.push_back(csv::parse_double(row[0]));
    for (std::size_t c = 1; c < row.size(); ++c) {
      data.features.push_back(csv::parse_double(row[c]));
    }
  }
  data.validate();
  return data;
}

}  // namespace fluxbench
