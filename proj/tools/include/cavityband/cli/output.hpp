#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace cavityband::cli {

// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

std::string sha256_hex(const std::string& bytes);

class CsvTable {
 public:
  using Cell = std::variant<double, long long, std::string>;

  // Column names carry their unit, e.g. "delta_c[omega_R]".
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}
  void add_row(std::vector<Cell> row);
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
  bool markers = false;  // dots instead of a polyline
};

std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                     const std::vector<PlotSeries>& series);

}  // namespace cavityband::cli
