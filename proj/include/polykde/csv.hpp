#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polykde/types.hpp"

namespace polykde {

// Numeric CSV: one row per observation, '#' lines are metadata/comments.
// labels_col extracts that column (0-based) as integer class labels.
struct CsvData {
  Matrix values;
  std::optional<std::vector<int>> labels;
};

CsvData read_csv(const std::string& path, std::optional<int> labels_col = std::nullopt);

// Rows written with 17 significant digits; header lines are prefixed '#'.
void write_csv(const std::string& path, const Matrix& values,
               const std::vector<std::string>& metadata = {},
               const std::string& column_header = "");

}  // namespace polykde
