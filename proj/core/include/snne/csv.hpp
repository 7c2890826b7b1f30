#ifndef SNNE_CSV_HPP
#define SNNE_CSV_HPP

#include <string>
#include <vector>

#include "snne/dataset.hpp"

namespace snne {

struct CsvOptions {
  std::string target_column;                  // empty: no target extraction
  std::vector<std::string> excluded_columns;  // dropped from features
};

// Numeric CSV with a header row. Empty cells and (case-insensitive) nan parse
// as missing feature values; a missing or unparseable target cell is an error.
// Parse failures report 1-based file line and column.
Dataset load_csv(const std::string& path, const CsvOptions& opts = {});

// NaN cells are written empty; finite values use 17 significant digits so a
// write/read round trip is value-exact.
void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

// Feature columns then a target column when present.
void write_dataset_csv(const std::string& path, const Dataset& data,
                       const std::string& target_name = "target");

}  // namespace snne

#endif  // SNNE_CSV_HPP
