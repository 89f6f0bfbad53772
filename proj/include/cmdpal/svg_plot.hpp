#pragma once

#include <string>
#include <vector>

namespace cmdpal {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal deterministic SVG line plot: axes, tick labels, legend, one
/// polyline per series.
std::string render_line_plot(const std::string& title, const std::string& x_label,
                             const std::string& y_label,
                             const std::vector<PlotSeries>& series,
                             int width = 640, int height = 420);

}  // namespace cmdpal
