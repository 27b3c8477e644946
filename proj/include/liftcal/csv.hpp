#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace liftcal {

/// Numeric CSV with a mandatory header row. Columns are stored by name.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const noexcept { return columns.empty() ? 0 : columns.front().size(); }
  std::optional<std::size_t> find(const std::string& name) const;
  /// Throws InvalidInputError naming the file when the column is missing.
  const std::vector<double>& column(const std::string& name) const;
  void add_column(std::string name, std::vector<double> values);

  std::string source;  // path, for diagnostics
};

Table parse_csv(std::istream& in, const std::string& source);
Table read_csv(const std::string& path);

/// Writes with 17 significant digits so values round-trip exactly.
void write_csv(std::ostream& out, const Table& table);
void write_csv_file(const std::string& path, const Table& table);

/// Lower-case hex SHA-256 of the file contents.
std::string sha256_file(const std::string& path);

std::string format_double(double v);

}  // namespace liftcal
