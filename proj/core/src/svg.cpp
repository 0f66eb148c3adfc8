#include "harnack/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "harnack/errors.hpp"

namespace harnack {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// piecewise-linear blue -> teal -> yellow ramp
std::string ramp(double t) {
  static const double stops[5][3] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(t));
  const double f = t - i;
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(stops[i][0] + f * (stops[i + 1][0] - stops[i][0])),
                static_cast<int>(stops[i][1] + f * (stops[i + 1][1] - stops[i][1])),
                static_cast<int>(stops[i][2] + f * (stops[i + 1][2] - stops[i][2])));
  return buf;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string heatmap_svg(const WeightedGraph& g, const VertexFunction& values, const HeatmapOptions& options) {
  if (!g.has_coords()) fail(ErrorKind::MissingCoordinates, "heatmaps need vertex coordinates");
  if (values.size() != static_cast<Eigen::Index>(g.vertex_count()))
    fail(ErrorKind::InvalidArgument, "one value per vertex expected");
  const bool two_d = g.coord_dim() >= 2;
  auto px = [&](VertexId v) { return g.coord(v)[0]; };
  auto py = [&](VertexId v) { return two_d ? g.coord(v)[1] : 0.0; };

  double xmin = kInfinity, xmax = -kInfinity, ymin = kInfinity, ymax = -kInfinity;
  double vmin = kInfinity, vmax = -kInfinity;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    xmin = std::min(xmin, px(v));
    xmax = std::max(xmax, px(v));
    ymin = std::min(ymin, py(v));
    ymax = std::max(ymax, py(v));
    double val = values[v];
    if (options.log_scale) val = val > 0.0 ? std::log10(val) : NAN;
    if (std::isfinite(val)) {
      vmin = std::min(vmin, val);
      vmax = std::max(vmax, val);
    }
  }
  const double cell = std::max(g.min_edge_length(), 1e-12);
  const double span = std::max({xmax - xmin, ymax - ymin, cell});
  const double scale = 560.0 / (span + cell);
  const double W = (xmax - xmin + cell) * scale + 40, H = (ymax - ymin + cell) * scale + 70;
  auto sx = [&](double x) { return 20 + (x - xmin + 0.5 * cell) * scale; };
  auto sy = [&](double y) { return 50 + (ymax - y + 0.5 * cell) * scale; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(W) << "\" height=\"" << num(H) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"20\" y=\"22\" font-family=\"sans-serif\" font-size=\"14\">" << escape(options.title) << "</text>\n";
  os << "<text x=\"20\" y=\"40\" font-family=\"sans-serif\" font-size=\"11\">" << (options.log_scale ? "log10 " : "")
     << "range [" << num(vmin) << ", " << num(vmax) << "]</text>\n";
  const double c = cell * scale;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    double val = values[v];
    if (options.log_scale) val = val > 0.0 ? std::log10(val) : NAN;
    if (!std::isfinite(val)) continue;
    const double t = vmax > vmin ? (val - vmin) / (vmax - vmin) : 0.5;
    os << "<rect x=\"" << num(sx(px(v)) - 0.5 * c) << "\" y=\"" << num(sy(py(v)) - 0.5 * c) << "\" width=\""
       << num(c) << "\" height=\"" << num(c) << "\" fill=\"" << ramp(t) << "\"/>\n";
  }
  for (VertexId v : options.boundary)
    os << "<circle cx=\"" << num(sx(px(v))) << "\" cy=\"" << num(sy(py(v))) << "\" r=\"" << num(std::max(1.0, 0.3 * c))
       << "\" fill=\"black\"/>\n";
  for (const auto& s : options.segments)
    os << "<line x1=\"" << num(sx(s[0])) << "\" y1=\"" << num(sy(s[1])) << "\" x2=\"" << num(sx(s[2])) << "\" y2=\""
       << num(sy(s[3])) << "\" stroke=\"black\" stroke-width=\"3\"/>\n";
  for (const auto& m : options.markers) {
    os << "<circle cx=\"" << num(sx(px(m.v))) << "\" cy=\"" << num(sy(py(m.v))) << "\" r=\"4\" fill=\"none\""
       << " stroke=\"red\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << num(sx(px(m.v)) + 6) << "\" y=\"" << num(sy(py(m.v)) - 6)
       << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"red\">" << escape(m.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string scatter_svg(const std::vector<Series>& series, bool loglog, const std::string& title,
                        const std::string& xlabel, const std::string& ylabel) {
  auto tx = [&](double v) { return loglog ? std::log10(v) : v; };
  auto ok = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!loglog || (x > 0.0 && y > 0.0));
  };
  double xmin = kInfinity, xmax = -kInfinity, ymin = kInfinity, ymax = -kInfinity;
  for (const auto& s : series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!ok(s.x[i], s.y[i])) continue;
      xmin = std::min(xmin, tx(s.x[i]));
      xmax = std::max(xmax, tx(s.x[i]));
      ymin = std::min(ymin, tx(s.y[i]));
      ymax = std::max(ymax, tx(s.y[i]));
    }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax - xmin < 1e-12) xmin -= 0.5, xmax += 0.5;
  if (ymax - ymin < 1e-12) ymin -= 0.5, ymax += 0.5;
  const double W = 640, H = 480, L = 70, R = 160, T = 40, B = 50;
  auto sx = [&](double x) { return L + (tx(x) - xmin) / (xmax - xmin) * (W - L - R); };
  auto sy = [&](double y) { return H - B - (tx(y) - ymin) / (ymax - ymin) * (H - T - B); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << L << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << escape(title) << "</text>\n";
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  const std::string pre = loglog ? "log10 " : "";
  os << "<text x=\"" << L << "\" y=\"" << H - 12 << "\" font-family=\"sans-serif\" font-size=\"12\">" << pre
     << escape(xlabel) << " [" << num(xmin) << ", " << num(xmax) << "]</text>\n";
  os << "<text x=\"12\" y=\"" << T + 12 << "\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 12 "
     << T + 12 << ")\" text-anchor=\"end\">" << pre << escape(ylabel) << " [" << num(ymin) << ", " << num(ymax)
     << "]</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % 6];
    std::string pts;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!ok(s.x[i], s.y[i])) continue;
      pts += num(sx(s.x[i])) + "," + num(sy(s.y[i])) + " ";
      os << "<circle cx=\"" << num(sx(s.x[i])) << "\" cy=\"" << num(sy(s.y[i])) << "\" r=\"3\" fill=\"" << color
         << "\"/>\n";
    }
    if (!pts.empty())
      os << "<polyline points=\"" << pts << "\" fill=\"none\" stroke=\"" << color << "\"/>\n";
    os << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 16 * (k + 1) << "\" font-family=\"sans-serif\""
       << " font-size=\"12\" fill=\"" << color << "\">" << escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace harnack
