#pragma once

#include <array>
#include <string>
#include <vector>

#include "harnack/graph.hpp"

namespace harnack {

struct Marker {
  VertexId v = 0;
  std::string label;
};

struct HeatmapOptions {
  std::string title;
  bool log_scale = true;
  VertexSet boundary;  ///< drawn in black
  std::vector<Marker> markers;
  /// Extra line segments (x0, y0, x1, y1) in graph coordinates, e.g. a slit.
  std::vector<std::array<double, 4>> segments;
};

/// One cell per vertex with a finite value; non-finite values are not drawn.
/// Needs coordinates (MissingCoordinates otherwise); 1-D graphs use one row.
std::string heatmap_svg(const WeightedGraph& g, const VertexFunction& values, const HeatmapOptions& options);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Scatter with lines; log-log axes when `loglog` (non-positive points dropped).
std::string scatter_svg(const std::vector<Series>& series, bool loglog, const std::string& title,
                        const std::string& xlabel, const std::string& ylabel);

}  // namespace harnack
