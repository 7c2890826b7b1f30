#include "snne/csv.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "snne/errors.hpp"

namespace snne {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

// Empty cell or nan -> NaN; anything else must consume as one double.
double parse_cell(const std::string& cell, std::size_t line_no, std::size_t col_no) {
  if (cell.empty()) return std::nan("");
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size()) {
    throw IoError("unparseable cell at line " + std::to_string(line_no) + " column " +
                  std::to_string(col_no) + ": '" + cell + "'");
  }
  return v;
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvOptions& opts) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);

  std::string line;
  if (!std::getline(in, line)) throw IoError("empty file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_line(line);

  std::size_t target_index = header.size();
  if (!opts.target_column.empty()) {
    const auto it = std::find(header.begin(), header.end(), opts.target_column);
    if (it == header.end())
      throw IoError("target column not found: " + opts.target_column);
    target_index = static_cast<std::size_t>(it - header.begin());
  }

  std::vector<bool> excluded(header.size(), false);
  for (const std::string& name : opts.excluded_columns) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw IoError("excluded column not found: " + name);
    excluded[static_cast<std::size_t>(it - header.begin())] = true;
  }

  Dataset data;
  data.has_target = target_index < header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == target_index || excluded[c]) continue;
    data.feature_names.push_back(header[c]);
  }
  if (data.feature_names.empty()) throw IoError("no feature columns left: " + path);

  std::vector<double> cells;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> row = split_line(line);
    if (row.size() != header.size()) {
      throw IoError("line " + std::to_string(line_no) + " has " +
                    std::to_string(row.size()) + " cells, header has " +
                    std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      const double v = parse_cell(row[c], line_no, c + 1);
      if (c == target_index) {
        if (std::isnan(v)) {
          throw IoError("missing target at line " + std::to_string(line_no) +
                        " column " + std::to_string(c + 1));
        }
        data.target.push_back(v);
      } else if (!excluded[c]) {
        cells.push_back(v);
      }
    }
  }

  const std::size_t n_cols = data.feature_names.size();
  const std::size_t n_rows = cells.size() / n_cols;
  data.features = FeatureMatrix(n_rows, n_cols);
  for (std::size_t r = 0; r < n_rows; ++r)
    for (std::size_t c = 0; c < n_cols; ++c) data.features(r, c) = cells[r * n_cols + c];
  data.validate();
  return data;
}

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  if (columns.empty()) throw ContractError("write_csv: no columns");
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot open for writing: " + path);
  for (std::size_t c = 0; c < columns.size(); ++c)
    std::fprintf(f, "%s%s", c ? "," : "", columns[c].c_str());
  std::fputc('\n', f);
  for (const std::vector<double>& row : rows) {
    if (row.size() != columns.size()) {
      std::fclose(f);
      throw ShapeError("write_csv: row width does not match header");
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) std::fputc(',', f);
      if (!std::isnan(row[c])) std::fprintf(f, "%.17g", row[c]);
    }
    std::fputc('\n', f);
  }
  if (std::fclose(f) != 0) throw IoError("write failed: " + path);
}

void write_dataset_csv(const std::string& path, const Dataset& data,
                       const std::string& target_name) {
  data.validate();
  std::vector<std::string> columns = data.feature_names;
  if (data.has_target) columns.push_back(target_name);
  std::vector<std::vector<double>> rows(data.rows());
  for (std::size_t r = 0; r < data.rows(); ++r) {
    rows[r].reserve(columns.size());
    for (std::size_t c = 0; c < data.features.cols(); ++c)
      rows[r].push_back(data.features(r, c));
    if (data.has_target) rows[r].push_back(data.target[r]);
  }
  write_csv(path, columns, rows);
}

}  // namespace snne
