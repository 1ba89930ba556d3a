#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace qdist::csv {

struct Row {
  std::size_t line = 0;  // 1-based line number in the source file
  std::vector<std::string> fields;
};

struct Table {
  std::filesystem::path source;
  std::vector<std::string> header;
  std::vector<Row> rows;

  /// Column index of name, or throws ValidationError naming the file.
  std::size_t column(std::string_view name) const;
};

/// Reads a UTF-8 CSV with a mandatory header row. Supports double-quoted
/// fields; blank lines are skipped. Ragged rows are reported with their line.
Table read(const std::filesystem::path& path);
Table parse(std::istream& in, const std::filesystem::path& source = "<stream>");

/// Parses a finite or non-finite double written with '.' as decimal separator.
double parse_double(std::string_view text, const Table& table, const Row& row,
                    std::string_view column);

/// Shortest representation that round-trips.
std::string format_double(double value);

/// Quotes a field if it contains a separator, quote or newline.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace qdist::csv
