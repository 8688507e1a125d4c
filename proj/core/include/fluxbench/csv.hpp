#pragma once

#include <string>
#include <vector>

namespace fluxbench::csv {

/// Shortest decimal representation that round-trips the exact double.
std::string format_double(double v);

/// Quotes a field if it contains separators, quotes or newlines.
std::string quote(const std::string& field);

std::string join_row(const std::vector<std::string>& fields);

/// Parses one CSV line honoring double-quote escaping.
std::vector<std::string> split_row(const std::string& line);

double parse_double(const std::string& field);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Table read_file(const std::string& path);
void write_file(const std::string& path, const Table& table);

}  // namespace fluxbench::csv
