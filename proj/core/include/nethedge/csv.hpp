#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace nethedge::csv {

/// A delimiter-separated table: one header row plus string cells.
struct Table {
  char delimiter = ',';
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column, or -1.
  [[nodiscard]] int column(std::string_view name) const;
};

/// Reads a delimiter-separated file. The delimiter is detected from the
/// header line (tab, then semicolon, then comma). Cells are trimmed and
/// surrounding double quotes removed. Blank lines and lines starting with
/// '#' are skipped. Throws DataError on unreadable files or ragged rows.
Table read(const std::filesystem::path& path);

/// Parses a decimal number; empty, "NA", "NaN" and "null" yield NaN.
/// Throws DataError on garbage.
double parse_number(std::string_view cell);

/// Shortest representation that parses back to the same double.
std::string format_number(double value);

/// Writes text atomically enough for our purposes (truncate + write).
void write_text(const std::filesystem::path& path, std::string_view text);

std::string read_text(const std::filesystem::path& path);

}  // namespace nethedge::csv
