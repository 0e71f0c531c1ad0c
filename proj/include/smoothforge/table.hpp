#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace smoothforge {

/// Column-oriented numeric table. Missing cells hold NaN.
struct DataTable {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  /// Index of `name`, or throws Error(user) naming the variable.
  std::size_t column_index(const std::string& name) const;
  const std::vector<double>& column(const std::string& name) const { return columns[column_index(name)]; }
};

/// Parses CSV text with a header row. Empty cells, NA and NaN are missing;
/// anything else must parse as a decimal number ('.' separator).
DataTable parse_csv(std::string_view text);
DataTable read_csv(const std::filesystem::path& path);

/// Keeps rows with no missing value in any of `used` columns.
/// Returns the filtered table; `dropped` receives the removed row count.
DataTable drop_missing(const DataTable& table, const std::vector<std::size_t>& used, std::size_t& dropped);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

/// Reads a whole file; throws Error(io) on failure.
std::string read_file(const std::filesystem::path& path);
/// Writes via a temporary sibling and renames, so readers never see partial output.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace smoothforge
