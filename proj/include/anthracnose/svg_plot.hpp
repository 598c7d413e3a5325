#pragma once

#include <string>
#include <vector>

namespace anthracnose {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string dash;  // SVG stroke-dasharray, empty for solid
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
};

/// Standalone SVG document with axes, ticks, labels and a legend. One
/// <polyline> per series. Non-finite points are skipped.
std::string render_svg(const PlotSpec& spec);

/// Escapes &, <, >, " and ' for XML text and attribute values.
std::string xml_escape(const std::string& s);

}  // namespace anthracnose
