#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "partwise/core.hpp"
#include "partwise/partitions.hpp"

namespace partwise {

class csv_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CsvTable {
  std::vector<std::string> header;
  Matrix values;  // rows x header.size()

  int column(const std::string& name) const {
    for (size_t j = 0; j < header.size(); ++j) {
      if (header[j] == name) return static_cast<int>(j);
    }
    return -1;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
  return s.substr(b, e - b);
}

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

inline double parse_cell(const std::string& cell, int line_no, size_t col) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw csv_error("line " + std::to_string(line_no) + ", column " + std::to_string(col + 1) +
                    ": not a number: '" + cell + "'");
  }
  if (!std::isfinite(value)) {
    throw csv_error("line " + std::to_string(line_no) + ", column " + std::to_string(col + 1) +
                    ": non-finite value");
  }
  return value;
}

}  // namespace detail

/// Numeric CSV with a mandatory header line. Cells are comma separated, no
/// quoting; surrounding spaces are ignored. Errors carry 1-based line numbers.
inline CsvTable read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw csv_error("line 1: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  CsvTable table;
  table.header = detail::split_line(line);
  const size_t width = table.header.size();
  for (size_t j = 0; j < width; ++j) {
    if (table.header[j].empty()) {
      throw csv_error("line 1: empty name for column " + std::to_string(j + 1));
    }
    for (size_t k = j + 1; k < width; ++k) {
      if (table.header[j] == table.header[k]) {
        throw csv_error("line 1: duplicate column name '" + table.header[j] + "'");
      }
    }
  }

  std::vector<double> flat;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> cells = detail::split_line(line);
    if (cells.size() == 1 && cells[0].empty()) {
      throw csv_error("line " + std::to_string(line_no) + ": empty line");
    }
    if (cells.size() != width) {
      throw csv_error("line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                      " cells, got " + std::to_string(cells.size()));
    }
    for (size_t j = 0; j < width; ++j) flat.push_back(detail::parse_cell(cells[j], line_no, j));
  }

  const Eigen::Index rows = static_cast<Eigen::Index>(flat.size() / width);
  table.values.resize(rows, static_cast<Eigen::Index>(width));
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(width); ++j) {
      table.values(i, j) = flat[static_cast<size_t>(i) * width + static_cast<size_t>(j)];
    }
  }
  return table;
}

inline CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw csv_error("cannot open '" + path + "'");
  try {
    return read_csv(in);
  } catch (const csv_error& e) {
    throw csv_error(path + ": " + e.what());
  }
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_csv(std::ostream& out, const std::vector<std::string>& header,
                      const Matrix& values) {
  for (size_t j = 0; j < header.size(); ++j) {
    if (j > 0) out << ',';
    out << header[j];
  }
  out << '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(values(i, j));
    }
    out << '\n';
  }
}

inline void write_csv_file(const std::string& path, const std::vector<std::string>& header,
                           const Matrix& values) {
  std::ofstream out(path);
  if (!out) throw csv_error("cannot open '" + path + "' for writing");
  write_csv(out, header, values);
  if (!out) throw csv_error("failed writing '" + path + "'");
}

/// Splits a table into features and the named target column. Feature kinds are
/// inferred from the observed values.
inline Dataset dataset_from_table(const CsvTable& table, const std::string& target_column,
                                  Task task) {
  const int target = table.column(target_column);
  if (target < 0) throw csv_error("target column '" + target_column + "' not found");
  if (table.header.size() < 2) throw csv_error("need at least one feature column");

  Dataset data;
  data.task = task;
  data.targets = table.values.col(target);
  data.features.resize(table.values.rows(), table.values.cols() - 1);
  Eigen::Index out = 0;
  for (Eigen::Index j = 0; j < table.values.cols(); ++j) {
    if (j == target) continue;
    data.features.col(out++) = table.values.col(j);
  }
  data.feature_kinds = infer_feature_kinds(data.features);
  data.validate();
  return data;
}

}  // namespace partwise
