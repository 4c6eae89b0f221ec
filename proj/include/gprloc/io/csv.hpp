#pragma once

#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "gprloc/core/error.hpp"
#include "gprloc/io/text.hpp"

namespace gprloc {

struct CsvTable {
  std::string origin;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    throw InputError(origin + ": missing column '" + std::string(name) + "'");
  }

  double num(std::size_t row, int col) const {
    return parse_double(rows[row][static_cast<std::size_t>(col)],
                        origin + " row " + format_int(static_cast<std::int64_t>(row + 2)));
  }
};

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  CsvTable table;
  table.origin = path;
  std::string line;
  if (!std::getline(in, line)) throw InputError(path + ": empty file");
  for (auto f : split(trim(line), ',')) table.header.emplace_back(trim(f));
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    auto s = trim(line);
    if (s.empty()) continue;
    auto fields = split(s, ',');
    if (fields.size() != table.header.size())
      throw InputError(path + ":" + format_int(lineno) + ": expected " +
                       format_int(static_cast<std::int64_t>(table.header.size())) + " fields, got " +
                       format_int(static_cast<std::int64_t>(fields.size())));
    std::vector<std::string> row;
    row.reserve(fields.size());
    for (auto f : fields) row.emplace_back(trim(f));
    table.rows.push_back(std::move(row));
  }
  return table;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path, std::ios::binary) {
    if (!out_) throw InputError("cannot write " + path);
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out_ << ',';
      out_ << header[i];
    }
    out_ << '\n';
  }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out_ << ',';
      out_ << format_double(values[i]);
    }
    out_ << '\n';
  }

  // Mixed text/number rows for report tables.
  void raw_row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << fields[i];
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

}  // namespace gprloc
