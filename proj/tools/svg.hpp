#pragma once

#include <span>
#include <string>
#include <vector>

namespace nws::app {

struct PlotSeries {
  std::string label;
  std::vector<double> y;
};

/// SVG 1.1 line plot of several series over a shared abscissa.
/// Non-finite samples break the polyline.
std::string render_line_plot(std::span<const double> x, std::span<const PlotSeries> series,
                             const std::string& title, const std::string& x_label,
                             const std::string& y_label);

}  // namespace nws::app
