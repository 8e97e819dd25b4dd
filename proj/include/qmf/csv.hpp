#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qmf {

/// A CSV document: "# key=value" metadata lines, a header, then rows.
struct CsvTable {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws if absent.
  std::size_t column(const std::string& name) const;
};

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

std::string to_csv(const CsvTable& t);
CsvTable parse_csv(std::string_view text);

/// Writes the table, creating or truncating the file.
void write_csv(const CsvTable& t, const std::string& path);
CsvTable read_csv(const std::string& path);

}  // namespace qmf
