#pragma once

#include <string>
#include <vector>

namespace dsmsim {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  /// Dashed vertical lines (e.g. occupied-bandwidth edges).
  std::vector<double> vlines;
};

/// Minimal standalone SVG line plot.
std::string render_svg(const PlotSpec& spec);

}  // namespace dsmsim
