#pragma once

#include <span>
#include <string>
#include <vector>

namespace scribe::svg {

struct Grid {
  std::string title;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<double> values; ///< row-major, rows x cols
  bool integer_cells = true;
};

/// Blue-scale heatmap with the cell value printed in each cell.
std::string heatmap(const Grid& grid);

struct Series {
  std::string name;
  std::vector<double> values;
};

/// Polyline plot of one or more series against their index (epoch).
std::string line_plot(const std::string& title, std::span<const Series> series, const std::string& x_label,
                      const std::string& y_label);

std::string escape(std::string_view text);

} // namespace scribe::svg
