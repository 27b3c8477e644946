#include "liftcal/csv.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "liftcal/error.hpp"

namespace liftcal {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(const std::string& field, const std::string& source, std::size_t line,
                    const std::string& column) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = first + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (field.empty() || ec != std::errc() || ptr != last) {
    throw InvalidInputError(source + ": line " + std::to_string(line) + ", column '" + column +
                            "': cannot parse '" + field + "' as a number");
  }
  if (!std::isfinite(v)) {
    throw InvalidInputError(source + ": line " + std::to_string(line) + ", column '" + column +
                            "': value is not finite");
  }
  return v;
}

}  // namespace

std::optional<std::size_t> Table::find(const std::string& name) const {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == name) return j;
  }
  return std::nullopt;
}

const std::vector<double>& Table::column(const std::string& name) const {
  const auto j = find(name);
  if (!j) throw InvalidInputError(source + ": missing column '" + name + "'");
  return columns[*j];
}

void Table::add_column(std::string name, std::vector<double> values) {
  if (!columns.empty() && values.size() != rows()) {
    throw ShapeError("column '" + name + "' has " + std::to_string(values.size()) +
                     " rows, table has " + std::to_string(rows()));
  }
  if (find(name)) throw InvalidInputError("duplicate column '" + name + "'");
  header.push_back(std::move(name));
  columns.push_back(std::move(values));
}

Table parse_csv(std::istream& in, const std::string& source) {
  Table t;
  t.source = source;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (!have_header) {
      for (auto& name : fields) {
        if (name.empty()) throw InvalidInputError(source + ": empty column name in header");
        if (t.find(name)) throw InvalidInputError(source + ": duplicate column '" + name + "'");
        t.header.push_back(name);
      }
      t.columns.resize(t.header.size());
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw InvalidInputError(source + ": line " + std::to_string(line_no) + " has " +
                              std::to_string(fields.size()) + " fields, header has " +
                              std::to_string(t.header.size()));
    }
    for (std::size_t j = 0; j < fields.size(); ++j) {
      t.columns[j].push_back(parse_number(fields[j], source, line_no, t.header[j]));
    }
  }
  if (!have_header) throw InvalidInputError(source + ": empty file, header row required");
  return t;
}

Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open '" + path + "'");
  return parse_csv(in, path);
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

void write_csv(std::ostream& out, const Table& table) {
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    out << (j ? "," : "") << table.header[j];
  }
  out << '\n';
  for (std::size_t i = 0; i < table.rows(); ++i) {
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
      out << (j ? "," : "") << format_double(table.columns[j][i]);
    }
    out << '\n';
  }
}

void write_csv_file(const std::string& path, const Table& table) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot write '" + path + "'");
  write_csv(out, table);
  if (!out) throw InvalidInputError("write to '" + path + "' failed");
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot open '" + path + "'");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 initialisation failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  }
  return hex.str();
}

}  // namespace liftcal
