#include "polykde/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace polykde {

CsvData read_csv(const std::string& path, std::optional<int> labels_col) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error("read_csv: non-numeric cell '" + cell + "' in " + path);
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("read_csv: no data rows in " + path);
  const std::size_t cols = rows.front().size();
  for (const auto& row : rows)
    if (row.size() != cols) throw std::runtime_error("read_csv: ragged rows in " + path);

  CsvData out;
  const int lcol = labels_col.value_or(-1);
  if (lcol >= 0) {
    if (static_cast<std::size_t>(lcol) >= cols)
      throw std::runtime_error("read_csv: labels column out of range");
    out.labels = std::vector<int>();
    out.values = Matrix(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols - 1));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      Eigen::Index c = 0;
      for (std::size_t j = 0; j < cols; ++j) {
        if (static_cast<int>(j) == lcol) {
          out.labels->push_back(static_cast<int>(std::lround(rows[i][j])));
        } else {
          out.values(static_cast<Eigen::Index>(i), c++) = rows[i][j];
        }
      }
    }
  } else {
    out.values = Matrix(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols; ++j)
        out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return out;
}

void write_csv(const std::string& path, const Matrix& values,
               const std::vector<std::string>& metadata, const std::string& column_header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  for (const auto& meta : metadata) out << "# " << meta << "\n";
  if (!column_header.empty()) out << "# " << column_header << "\n";
  char buf[40];
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", values(i, j));
      out << buf;
      if (j + 1 < values.cols()) out << ',';
    }
    out << '\n';
  }
}

}  // namespace polykde
