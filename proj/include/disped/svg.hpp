#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "disped/scenario.hpp"

namespace disped {

struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // NaN gaps split the polyline
};

struct SvgChartSpec {
  std::string title;
  std::string x_label = "t";
  std::string y_label;
  int width = 860;
  int height = 520;
  bool legend = false;
};

/// Self-contained deterministic SVG line chart.
void write_line_chart(const std::filesystem::path& path, const SvgChartSpec& spec,
                      const std::vector<SvgSeries>& series);

/// Renders one panel (alloc | cost | mismatch) from a trajectory CSV.
void write_panel_from_csv(const CsvTable& table, const std::string& panel,
                          const std::filesystem::path& path);

}  // namespace disped
