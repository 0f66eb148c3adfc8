#include "lab.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "harnack/bhp.hpp"
#include "harnack/errors.hpp"
#include "harnack/estimators.hpp"
#include "harnack/gallery.hpp"
#include "harnack/graph_io.hpp"
#include "harnack/potential.hpp"
#include "harnack/svg.hpp"

namespace harnack::lab {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kSchema = "harnack-lab/1";

// --- formatting -----------------------------------------------------------

std::string cnum(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

json jnum(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return std::strtod(cnum(v).c_str(), nullptr);
}

std::string cid(VertexId v) { return std::to_string(v); }

struct Assertion {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double bound = 0.0;
};

struct Table {
  std::string suffix;  ///< appended to the task name; empty for the main table
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct TaskOutput {
  json results = json::object();
  std::vector<Assertion> assertions;
  std::vector<Table> tables;
  std::vector<std::pair<double, double>> scale;  ///< (r, constant)
  std::string scale_label;
};

void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) fail(ErrorKind::IoError, "cannot write " + tmp.string());
    os << content;
    if (!os.flush()) fail(ErrorKind::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) fail(ErrorKind::IoError, "cannot rename onto " + path.string() + ": " + ec.message());
}

std::string read_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::IoError, "cannot read " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.header.size(); ++i) out += (i ? "," : "") + t.header[i];
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
    out += "\n";
  }
  return out;
}

std::string safe_name(const std::string& s) {
  std::string out;
  for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return out;
}

bool is_rejection(ErrorKind k) {
  switch (k) {
    case ErrorKind::ConfigRejected:
    case ErrorKind::BadMesh:
    case ErrorKind::NoFarPoint:
    case ErrorKind::NoSpecialPoint:
    case ErrorKind::EmptySphere:
    case ErrorKind::EmptyHalfBall:
    case ErrorKind::BadNesting:
    case ErrorKind::DegenerateDomain:
    case ErrorKind::EmptyInterior:
    case ErrorKind::NoChain:
    case ErrorKind::Unreachable:
    case ErrorKind::Infeasible:
    case ErrorKind::EmptyFreeBoundary:
    case ErrorKind::EmptyCone:
    case ErrorKind::InvalidArgument:
    case ErrorKind::MissingCoordinates:
    case ErrorKind::NoBoundary:
      return true;
    default:
      return false;
  }
}

// --- instances and references ----------------------------------------------

GalleryInstance load_instance(const json& spec, const fs::path& base) {
  if (spec.contains("file")) {
    const fs::path p = base / spec.at("file").get<std::string>();
    json j;
    try {
      j = json::parse(read_file(p));
    } catch (const json::exception& e) {
      fail(ErrorKind::ConfigParse, p.string() + ": " + e.what());
    }
    if (!j.contains("graph") || !j.contains("domain")) fail(ErrorKind::ConfigParse, p.string() + ": graph and domain needed");
    auto g = std::make_shared<const WeightedGraph>(read_graph_json(j["graph"].dump()));
    DomainView dv = domain_view(g, j["domain"].at("interior").get<VertexSet>(), j["domain"].at("boundary").get<VertexSet>());
    if (j["domain"].contains("frame")) dv.set_frame(j["domain"]["frame"].get<VertexSet>());
    std::map<std::string, VertexId> marks;
    if (j.contains("landmarks")) marks = j["landmarks"].get<std::map<std::string, VertexId>>();
    return GalleryInstance{g, dv, "file", {}, g->max_edge_length(), p.filename().string(), marks};
  }
  std::map<std::string, double> params;
  if (spec.contains("params")) params = spec["params"].get<std::map<std::string, double>>();
  return build_gallery(spec.at("builder").get<std::string>(), params);
}

VertexId resolve(const GalleryInstance& gi, const json& ref) {
  if (ref.is_string()) return gi.landmark(ref.get<std::string>());
  if (ref.is_array()) {
    const auto c = ref.get<std::vector<double>>();
    return gi.vertex_at(c);
  }
  if (ref.is_number_unsigned() || ref.is_number_integer()) {
    const auto v = ref.get<std::int64_t>();
    if (v < 0 || static_cast<std::size_t>(v) >= gi.domain.graph().vertex_count())
      fail(ErrorKind::InvalidArgument, "vertex id out of range");
    return static_cast<VertexId>(v);
  }
  fail(ErrorKind::ConfigParse, "vertex reference must be a landmark, coordinates or an id");
}

VertexId ambient_at(const WeightedGraph& g, const std::vector<double>& c) {
  if (!g.has_coords() || g.coord_dim() != c.size()) fail(ErrorKind::MissingCoordinates, "coordinates do not match");
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    bool same = true;
    for (std::size_t k = 0; k < c.size(); ++k) same = same && std::abs(g.coord(v)[k] - c[k]) < 1e-9;
    if (same) return v;
  }
  fail(ErrorKind::InvalidArgument, "no vertex at the requested coordinates");
}

std::vector<double> radii_of(const json& t) { return t.at("radii").get<std::vector<double>>(); }

BhpConfig bhp_config(const GalleryInstance& gi, const json& t, double r) {
  BhpConfig c{gi.domain};
  c.xi = resolve(gi, t.value("boundary", json("xi")));
  c.r = r;
  const json k = t.value("constants", json::object());
  c.c_U = k.value("c_U", 0.25);
  c.C_U = k.value("C_U", 2.0);
  if (k.contains("A0")) c.A0 = k["A0"].get<double>();
  if (k.contains("A2")) c.A2 = k["A2"].get<double>();
  if (k.contains("A3")) c.A3 = k["A3"].get<double>();
  if (k.contains("A4")) c.A4 = k["A4"].get<double>();
  c.annulus_half_width = k.value("annulus_half_width", 3.0);
  return c;
}

json constants_json(const BhpConstants& k) {
  return {{"A0", jnum(k.A0)}, {"A2", jnum(k.A2)}, {"A3", jnum(k.A3)}, {"A4", jnum(k.A4)}, {"A5", jnum(k.A5)}};
}

// --- assertion helpers --------------------------------------------------------

void check_scale(TaskOutput& out, const json& t) {
  const json a = t.value("assert", json::object());
  if (!a.contains("max_scale_ratio") || out.scale.size() < 2) return;
  const double m = a["max_scale_ratio"].get<double>();
  double worst = 1.0;
  for (std::size_t i = 1; i < out.scale.size(); ++i) {
    const double q = out.scale[i].second / out.scale[i - 1].second;
    worst = std::max(worst, std::isfinite(q) && q > 0 ? std::max(q, 1.0 / q) : kInfinity);
  }
  out.assertions.push_back({"scale_ratio", worst <= m, worst, m});
}

void check_finite(TaskOutput& out, const std::string& name, double v) {
  out.assertions.push_back({name, std::isfinite(v), v, kInfinity});
}

// --- tasks ----------------------------------------------------------------------

using TaskFn = std::function<TaskOutput(const GalleryInstance&, const json&, std::uint64_t)>;

TaskOutput task_ehi(const GalleryInstance& gi, const json& t, std::uint64_t seed) {
  TaskOutput out;
  const auto& g = gi.domain.graph();
  std::vector<VertexId> centers;
  for (const auto& c : t.value("centers", json::array({"center"}))) centers.push_back(resolve(gi, c));
  const auto radii = radii_of(t);
  const double delta = t.value("delta", 0.5);
  const auto scan = ehi_scan(g, centers, radii, delta);
  Table tab{"", {"center", "R", "delta", "C_H", "x_max", "x_min", "z", "skipped", "sampled_max"}, {}};
  double worst_excess = 0.0, worst_witness = 0.0;
  for (const auto& e : scan.entries) {
    const double sampled = sampled_spread(e.half_ball.values, 100, seed);
    worst_excess = std::max(worst_excess, sampled - e.C_H);
    const double w = e.half_ball(e.x_max, e.z) / e.half_ball(e.x_min, e.z);
    worst_witness = std::max(worst_witness, std::abs(w - e.C_H) / e.C_H);
    tab.rows.push_back({cid(e.center), cnum(e.R), cnum(e.delta), cnum(e.C_H), cid(e.x_max), cid(e.x_min), cid(e.z),
                        std::to_string(e.skipped_columns), cnum(sampled)});
  }
  out.tables.push_back(std::move(tab));
  out.results["sup"] = jnum(scan.sup);
  out.results["scale_stability"] = jnum(scan.scale_stability);
  check_finite(out, "finite", scan.sup);
  out.assertions.push_back({"sampled_within_constant", worst_excess <= 1e-9, worst_excess, 1e-9});
  out.assertions.push_back({"witness_attains", worst_witness <= 1e-9, worst_witness, 1e-9});
  const json a = t.value("assert", json::object());
  if (a.contains("max_scale_ratio")) {
    const double m = a["max_scale_ratio"].get<double>();
    out.assertions.push_back({"scale_ratio", scan.scale_stability <= m, scan.scale_stability, m});
  }
  if (a.value("monotone", false)) {
    bool mono = true;
    for (std::size_t i = 1; i < scan.entries.size(); ++i)
      if (scan.entries[i].center == scan.entries[i - 1].center && !(scan.entries[i].C_H > scan.entries[i - 1].C_H))
        mono = false;
    out.assertions.push_back({"monotone_in_R", mono, mono ? 1.0 : 0.0, 1.0});
  }
  if (a.contains("min_sup")) {
    const double m = a["min_sup"].get<double>();
    out.assertions.push_back({"sup_at_least", scan.sup >= m, scan.sup, m});
  }
  for (const auto& e : scan.entries)
    if (e.center == scan.entries.front().center) out.scale.emplace_back(e.R, e.C_H);
  out.scale_label = "C_H";
  return out;
}

TaskOutput task_bhp(const GalleryInstance& gi, const json& t, std::uint64_t seed) {
  TaskOutput out;
  Table tab{"", {"r", "C1", "trivial_cone", "x", "y", "z", "z_prime", "rows", "columns", "skipped", "sampled_max"}, {}};
  double worst_excess = 0.0, worst_witness = 0.0, worst_below_one = 0.0, worst_from_one = 0.0;
  for (double r : radii_of(t)) {
    const BhpConfig cfg = bhp_config(gi, t, r);
    const BhpMeasurement m = bhp_constant(cfg);
    out.results["constants"] = constants_json(m.constants);
    double sampled = 1.0;
    if (!m.trivial_cone) {
      sampled = sampled_cross_ratio(m.cone.values, 100, seed);
      worst_witness = std::max(worst_witness, std::abs(witness_ratio(m.cone, m.witness) - m.C1) / m.C1);
    }
    worst_excess = std::max(worst_excess, sampled - m.C1 * (1.0 + 1e-12));
    worst_below_one = std::max(worst_below_one, 1.0 - m.C1);
    worst_from_one = std::max(worst_from_one, std::abs(m.C1 - 1.0));
    tab.rows.push_back({cnum(r), cnum(m.C1), m.trivial_cone ? "1" : "0", cid(m.witness.x), cid(m.witness.y),
                        cid(m.witness.z), cid(m.witness.z_prime), std::to_string(m.cone.rows.size()),
                        std::to_string(m.cone.columns.size()), std::to_string(m.skipped_columns), cnum(sampled)});
    out.scale.emplace_back(r, m.C1);
    check_finite(out, "finite_r" + cnum(r), m.C1);
  }
  out.tables.push_back(std::move(tab));
  out.assertions.push_back({"at_least_one", worst_below_one <= 1e-9, worst_below_one, 1e-9});
  out.assertions.push_back({"sampled_within_constant", worst_excess <= 1e-9, worst_excess, 1e-9});
  out.assertions.push_back({"witness_attains", worst_witness <= 1e-9, worst_witness, 1e-9});
  if (t.value("assert", json::object()).value("expect_one", false))
    out.assertions.push_back({"equals_one", worst_from_one <= 1e-9, worst_from_one, 1e-9});
  out.scale_label = "C1";
  check_scale(out, t);
  return out;
}

TaskOutput task_cross(const GalleryInstance& gi, const json& t, std::uint64_t) {
  TaskOutput out;
  Table tab{"", {"r", "value", "x1", "x2", "y1", "y2", "rows", "columns", "swapped"}, {}};
  double worst_swap = 0.0;
  for (double r : radii_of(t)) {
    const BhpConfig cfg = bhp_config(gi, t, r);
    const GreenCrossRatio gx = green_cross_ratio(cfg);
    out.results["constants"] = constants_json(cfg.constants());
    const double sw = cross_ratio(gx.green, gx.x2, gx.x1, gx.y1, gx.y2);
    worst_swap = std::max(worst_swap, std::abs(sw * gx.value - 1.0));
    tab.rows.push_back({cnum(r), cnum(gx.value), cid(gx.x1), cid(gx.x2), cid(gx.y1), cid(gx.y2),
                        std::to_string(gx.green.rows.size()), std::to_string(gx.green.columns.size()), cnum(sw)});
    out.scale.emplace_back(r, gx.value);
    check_finite(out, "finite_r" + cnum(r), gx.value);
  }
  out.tables.push_back(std::move(tab));
  out.assertions.push_back({"swap_inverts", worst_swap <= 1e-12, worst_swap, 1e-12});
  out.scale_label = "cross-ratio";
  check_scale(out, t);
  return out;
}

TaskOutput task_gc1(const GalleryInstance& gi, const json& t, std::uint64_t) {
  TaskOutput out;
  Table tab{"",
            {"r", "x_star", "y_star", "z_star", "far_count", "far_min", "far_max", "near_count", "near_min", "near_max",
             "spread"},
            {}};
  Table rows{"-rows", {"r", "x", "y", "far", "ratio"}, {}};
  const bool keep_rows = t.value("write_rows", false);
  for (double r : radii_of(t)) {
    const BhpConfig cfg = bhp_config(gi, t, r);
    const Gc1Report g = gc1_decomposition_check(cfg);
    tab.rows.push_back({cnum(r), cid(g.points.x_star), cid(g.points.y_star), cid(g.points.z_star),
                        std::to_string(g.far_count), cnum(g.far_min), cnum(g.far_max), std::to_string(g.near_count),
                        cnum(g.near_min), cnum(g.near_max), cnum(g.spread)});
    if (keep_rows)
      for (const auto& row : g.rows)
        rows.rows.push_back({cnum(r), cid(row.x), cid(row.y), row.far ? "1" : "0", cnum(row.ratio)});
    out.scale.emplace_back(r, g.spread);
    check_finite(out, "finite_r" + cnum(r), g.spread);
    const json a = t.value("assert", json::object());
    if (a.contains("max_spread")) {
      const double m = a["max_spread"].get<double>();
      out.assertions.push_back({"spread_r" + cnum(r), g.spread <= m, g.spread, m});
    }
  }
  out.tables.push_back(std::move(tab));
  if (keep_rows) out.tables.push_back(std::move(rows));
  out.scale_label = "gc1 spread";
  check_scale(out, t);
  return out;
}

TaskOutput task_annulus(const GalleryInstance& gi, const json& t, std::uint64_t seed) {
  TaskOutput out;
  Table tab{"",
            {"r", "max_ratio", "x", "z", "y_star", "annulus_size", "curve_scale", "curve_A3", "certified", "skipped",
             "violations"},
            {}};
  Table curves{"-curves",
               {"r", "y1", "y2", "distance", "length", "certified", "min_distance", "max_distance", "avoids_inner",
                "stays_inside"},
               {}};
  std::size_t violations = 0;
  double worst_below_one = 0.0;
  const std::size_t pairs = t.value("curve_pairs", 100);
  for (double r : radii_of(t)) {
    const BhpConfig cfg = bhp_config(gi, t, r);
    const AnnulusReport a = annulus_bound_check(cfg, pairs, seed);
    violations += a.curve_violations;
    worst_below_one = std::max(worst_below_one, 1.0 - a.max_ratio);
    tab.rows.push_back({cnum(r), cnum(a.max_ratio), cid(a.x), cid(a.z), cid(a.y_star), std::to_string(a.annulus_size),
                        cnum(a.curve_scale), cnum(a.curve_A3), std::to_string(a.curves_certified),
                        std::to_string(a.curves_skipped), std::to_string(a.curve_violations)});
    for (const auto& c : a.curves)
      curves.rows.push_back({cnum(r), cid(c.y1), cid(c.y2), cnum(c.distance), cnum(c.length), c.certified ? "1" : "0",
                             cnum(c.min_distance), cnum(c.max_distance), c.avoids_inner ? "1" : "0",
                             c.stays_inside ? "1" : "0"});
    out.scale.emplace_back(r, a.max_ratio);
    check_finite(out, "finite_r" + cnum(r), a.max_ratio);
  }
  out.tables.push_back(std::move(tab));
  out.tables.push_back(std::move(curves));
  out.assertions.push_back({"ratio_at_least_one", worst_below_one <= 1e-9, worst_below_one, 1e-9});
  out.assertions.push_back({"curves_avoid_inner_ball", violations == 0, static_cast<double>(violations), 0.0});
  out.scale_label = "annulus ratio";
  check_scale(out, t);
  return out;
}

TaskOutput task_cw(const GalleryInstance& gi, const json& t, std::uint64_t) {
  TaskOutput out;
  CapacitaryWidthOptions o;
  o.max_points = t.value("max_points", 64);
  const auto res = cw_linear_bound_check(gi.domain, resolve(gi, t.value("boundary", json("xi"))), t.value("eta", 0.1),
                                         radii_of(t), t.value("window", 2.0), o);
  Table tab{"", {"r", "w", "ratio", "points"}, {}};
  for (const auto& e : res.entries) {
    tab.rows.push_back({cnum(e.r), cnum(e.w), cnum(e.ratio), std::to_string(e.points)});
    out.scale.emplace_back(e.r, e.ratio);
  }
  out.tables.push_back(std::move(tab));
  out.results["A1"] = jnum(res.A1);
  out.results["spread"] = jnum(res.spread);
  const double m = t.value("assert", json::object()).value("max_spread", 2.0);
  out.assertions.push_back({"ratio_spread", std::isfinite(res.spread) && res.spread <= m, res.spread, m});
  out.scale_label = "w/r";
  return out;
}

TaskOutput task_hm_decay(const GalleryInstance& gi, const json& t, std::uint64_t) {
  TaskOutput out;
  const WeightedGraph& g = gi.domain.has_ambient() ? gi.domain.ambient() : gi.domain.graph();
  const json s = t.at("strip");
  const auto axis = s.value("axis", 1);
  const double lo = s.at("min").get<double>(), hi = s.at("max").get<double>();
  if (!g.has_coords() || static_cast<std::size_t>(axis) >= g.coord_dim())
    fail(ErrorKind::MissingCoordinates, "strip selection needs coordinates");
  VertexSet V;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    const double c = g.coord(v)[static_cast<std::size_t>(axis)];
    if (c >= lo - 1e-9 && c <= hi + 1e-9) V.push_back(v);
  }
  const VertexId x = ambient_at(g, t.at("x").get<std::vector<double>>());
  double width = 0.0;
  if (t.contains("width") && t["width"].is_number()) {
    width = t["width"].get<double>();
  } else {
    const double mesh = g.max_edge_length();
    const auto grid = geometric_grid(mesh, 64.0 * mesh);
    width = capacitary_width(g, V, t.value("eta", 0.1), grid).w;
  }
  const auto res = hm_decay_check(g, V, x, radii_of(t), width);
  Table tab{"", {"r", "omega"}, {}};
  for (std::size_t i = 0; i < res.r.size(); ++i) tab.rows.push_back({cnum(res.r[i]), cnum(res.omega[i])});
  out.tables.push_back(std::move(tab));
  out.results["width"] = jnum(res.width);
  out.results["slope"] = jnum(res.fit.slope);
  out.results["intercept"] = jnum(res.fit.intercept);
  out.results["r2"] = jnum(res.fit.r2);
  const double min_r2 = t.value("assert", json::object()).value("min_r2", 0.9);
  out.assertions.push_back({"negative_slope", res.fit.slope < 0.0 && !res.flat, res.fit.slope, 0.0});
  out.assertions.push_back({"fit_r2", res.fit.r2 >= min_r2, res.fit.r2, min_r2});
  out.assertions.push_back({"monotone", res.monotone, res.monotone ? 1.0 : 0.0, 1.0});
  return out;
}

TaskOutput task_hm_green(const GalleryInstance& gi, const json& t, std::uint64_t) {
  TaskOutput out;
  Table tab{"", {"r", "C4", "xi_r", "xi_r_prime", "witness", "points"}, {}};
  const VertexId xi = resolve(gi, t.value("boundary", json("xi")));
  const double A2 = t.value("A2", 6.0), c_U = t.value("c_U", 0.25);
  for (double r : radii_of(t)) {
    const auto h = hm_green_bound(gi.domain, xi, r, A2, c_U);
    tab.rows.push_back({cnum(r), cnum(h.C4), cid(h.xi_r), cid(h.xi_r_prime), cid(h.witness), std::to_string(h.points)});
    out.scale.emplace_back(r, h.C4);
    check_finite(out, "finite_r" + cnum(r), h.C4);
  }
  out.tables.push_back(std::move(tab));
  out.scale_label = "C4";
  check_scale(out, t);
  return out;
}

TaskOutput task_green_compare(const GalleryInstance& gi, const json& t, std::uint64_t) {
  TaskOutput out;
  Table tab{"",
            {"r", "C0", "C1", "C2", "C3", "inf_sphere_green", "cap_closed", "cap_open", "cap_small", "cap_mid",
             "constant_free_ok"},
            {}};
  GreenComparisonConfig c;
  c.x0 = resolve(gi, t.value("center", json("center")));
  c.A1 = t.value("A1", 2.0);
  c.A2 = t.value("A2", 4.0);
  c.a = t.value("a", 0.5);
  bool ok = true;
  for (double r : radii_of(t)) {
    c.r = r;
    const auto res = green_comparison_suite(gi.domain.graph(), c);
    ok = ok && res.constant_free_ok();
    tab.rows.push_back({cnum(r), cnum(res.C0), cnum(res.C1), cnum(res.C2), cnum(res.C3), cnum(res.inf_sphere_green),
                        cnum(res.cap_closed), cnum(res.cap_open), cnum(res.cap_small), cnum(res.cap_mid),
                        res.constant_free_ok() ? "1" : "0"});
    out.scale.emplace_back(r, res.C0);
  }
  out.tables.push_back(std::move(tab));
  out.assertions.push_back({"constant_free_inequalities", ok, ok ? 1.0 : 0.0, 1.0});
  out.scale_label = "C0";
  return out;
}

TaskOutput task_axioms(const GalleryInstance& gi, const json& t, std::uint64_t) {
  TaskOutput out;
  const auto& g = gi.domain.graph();
  const VertexId x0 = resolve(gi, t.value("center", json("center")));
  const double R = t.at("R").get<double>();
  const GreenTable gt(g, gi.domain.inner_ball(x0, R));
  const auto& dom = gt.domain();
  double asym = 0.0, gmin = kInfinity, gmax = 0.0;
  const std::size_t stride = std::max<std::size_t>(1, dom.size() / 64);
  for (std::size_t i = 0; i < dom.size(); i += stride)
    for (std::size_t j = 0; j < dom.size(); j += stride) {
      const double a = gt(dom[i], dom[j]), b = gt(dom[j], dom[i]);
      asym = std::max(asym, std::abs(a - b));
      gmin = std::min(gmin, a);
      gmax = std::max(gmax, a);
    }
  out.assertions.push_back({"symmetry", asym <= 1e-10 * gmax, asym / gmax, 1e-10});
  out.assertions.push_back({"positivity", gmin > 0.0, gmin, 0.0});
  Table tab{"", {"W_radius", "inf_inside", "inf_boundary", "sup_outside", "sup_boundary", "inf_ok", "sup_ok"}, {}};
  bool ok = true;
  for (double w : t.value("W", std::vector<double>{R / 2})) {
    VertexSet W;
    const auto d = gi.domain.distances_from(x0);
    for (VertexId v : dom)
      if ((*d)[v] <= w + 1e-9) W.push_back(v);
    const auto mp = check_maximum_principles(g, gt, x0, W);
    const bool inf_ok = mp.inf_clause_vacuous || mp.inf_holds;
    ok = ok && inf_ok && mp.sup_holds;
    tab.rows.push_back({cnum(w), cnum(mp.inf_inside), cnum(mp.inf_boundary), cnum(mp.sup_outside),
                        cnum(mp.sup_boundary), inf_ok ? "1" : "0", mp.sup_holds ? "1" : "0"});
  }
  out.tables.push_back(std::move(tab));
  out.assertions.push_back({"maximum_principles", ok, ok ? 1.0 : 0.0, 1.0});
  return out;
}

TaskOutput task_uniformity(const GalleryInstance& gi, const json& t, std::uint64_t seed) {
  TaskOutput out;
  PairSampling s;
  const std::string policy = t.value("policy", "auto");
  s.policy = policy == "exhaustive" ? PairPolicy::Exhaustive : policy == "sampled" ? PairPolicy::Sampled : PairPolicy::Auto;
  s.seed = seed;
  s.random_pairs = t.value("random_pairs", s.random_pairs);
  s.boundary_pairs = t.value("boundary_pairs", s.boundary_pairs);
  const auto est = estimate_inner_uniformity_constants(gi.domain, s, t.value("ratio_cap", 32.0));
  Table tab{"", {"c", "C"}, {}};
  for (const auto& [c, C] : est.table) tab.rows.push_back({cnum(c), cnum(C)});
  out.tables.push_back(std::move(tab));
  out.results["c_U"] = jnum(est.c);
  out.results["C_U"] = jnum(est.C);
  check_finite(out, "feasible", est.C);
  return out;
}

const std::map<std::string, TaskFn>& task_table() {
  static const std::map<std::string, TaskFn> table{
      {"ehi-scan", task_ehi},         {"bhp", task_bhp},
      {"cross-ratio", task_cross},    {"gc1", task_gc1},
      {"annulus", task_annulus},      {"cw-bound", task_cw},
      {"hm-decay", task_hm_decay},    {"hm-green", task_hm_green},
      {"green-compare", task_green_compare}, {"green-axioms", task_axioms},
      {"inner-uniformity", task_uniformity},
  };
  return table;
}

struct TaskRecord {
  std::string status = "passed";
  std::string error;
  TaskOutput output;
  double seconds = 0.0;
};

json instance_spec(const json& cfg, const json& t) {
  const json& ref = t.at("instance");
  if (ref.is_string()) {
    const auto name = ref.get<std::string>();
    if (!cfg.contains("instances") || !cfg["instances"].contains(name))
      fail(ErrorKind::ConfigParse, "unknown instance '" + name + "'");
    return cfg["instances"][name];
  }
  return ref;
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return is_rejection(err->kind()) ? 2 : 1;
  return 1;
}

RunOutcome run_config(const fs::path& config, const RunOptions& options) {
  json cfg;
  try {
    cfg = json::parse(read_file(config));
  } catch (const json::exception& e) {
    fail(ErrorKind::ConfigParse, config.string() + ": " + e.what());
  }
  if (cfg.value("schema", std::string()) != kSchema)
    fail(ErrorKind::ConfigParse, std::string("schema must be \"") + kSchema + "\"");
  if (!cfg.contains("tasks") || !cfg["tasks"].is_array() || cfg["tasks"].empty())
    fail(ErrorKind::ConfigParse, "config needs a non-empty task list");
  const fs::path base = fs::absolute(config).parent_path();
  const std::uint64_t seed = cfg.value("seed", std::uint64_t{1});

  std::vector<json> tasks;
  std::vector<json> specs;
  std::set<std::string> names;
  try {
    for (const auto& t : cfg["tasks"]) {
      const auto name = t.at("name").get<std::string>();
      const auto kind = t.at("kind").get<std::string>();
      if (!names.insert(name).second) fail(ErrorKind::ConfigParse, "duplicate task name '" + name + "'");
      if (!task_table().count(kind)) fail(ErrorKind::ConfigParse, "unknown task kind '" + kind + "'");
      tasks.push_back(t);
      specs.push_back(instance_spec(cfg, t));
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::ConfigParse, e.what());
  }

  // instances are built once, serially, and shared by the tasks that name them
  std::map<std::string, std::shared_ptr<GalleryInstance>> built;
  std::map<std::string, std::string> build_errors;
  std::map<std::string, bool> build_rejected;
  for (const auto& s : specs) {
    const auto key = s.dump();
    if (built.count(key) || build_errors.count(key)) continue;
    try {
      built[key] = std::make_shared<GalleryInstance>(load_instance(s, base));
    } catch (const json::exception& e) {
      build_errors[key] = std::string("ConfigParse: ") + e.what();
      build_rejected[key] = false;
    } catch (const std::exception& e) {
      build_errors[key] = e.what();
      build_rejected[key] = exit_code_for(e) == 2;
    }
  }

  std::vector<TaskRecord> records(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      auto& rec = records[i];
      const auto key = specs[i].dump();
      if (auto it = build_errors.find(key); it != build_errors.end()) {
        rec.status = build_rejected[key] ? "rejected" : "failed";
        rec.error = it->second;
        continue;
      }
      const auto t0 = std::chrono::steady_clock::now();
      try {
        rec.output = task_table().at(tasks[i]["kind"].get<std::string>())(*built[key], tasks[i], seed);
        for (const auto& a : rec.output.assertions)
          if (!a.passed) rec.status = "failed";
      } catch (const json::exception& e) {
        rec.status = "failed";
        rec.error = std::string("ConfigParse: ") + e.what();
      } catch (const std::exception& e) {
        rec.status = exit_code_for(e) == 2 ? "rejected" : "failed";
        rec.error = e.what();
      }
      rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::error_code ec;
  fs::create_directories(options.out_dir, ec);
  if (ec) fail(ErrorKind::IoError, "cannot create " + options.out_dir.string());

  RunOutcome outcome;
  json report;
  report["schema"] = std::string(kSchema) + "/report";
  report["config"] = config.filename().string();
  report["config_dir"] = base.string();
  report["seed"] = seed;
  report["solver_tolerance"] = jnum(default_solver_tolerance());
  json jt = json::array();
  json timing = json::object();
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& rec = records[i];
    const auto name = tasks[i]["name"].get<std::string>();
    json e;
    e["name"] = name;
    e["kind"] = tasks[i]["kind"];
    e["spec"] = tasks[i];
    e["instance_spec"] = specs[i];
    e["status"] = rec.status;
    if (!rec.error.empty()) e["error"] = rec.error;
    e["results"] = rec.output.results;
    json as = json::array();
    for (const auto& a : rec.output.assertions)
      as.push_back({{"name", a.name}, {"passed", a.passed}, {"value", jnum(a.value)}, {"bound", jnum(a.bound)}});
    e["assertions"] = as;
    if (!rec.output.scale.empty()) {
      json sc = json::array();
      for (const auto& [r, v] : rec.output.scale) sc.push_back({{"r", jnum(r)}, {"value", jnum(v)}});
      e["scale"] = {{"label", rec.output.scale_label}, {"points", sc}};
    }
    json files = json::array();
    for (const auto& tab : rec.output.tables) {
      const auto file = safe_name(name) + tab.suffix + ".csv";
      write_atomic(options.out_dir / file, csv(tab));
      files.push_back(file);
    }
    e["csv"] = files;
    jt.push_back(e);
    timing[name] = jnum(rec.seconds);
    if (rec.status == "passed") ++outcome.passed;
    else if (rec.status == "rejected") ++outcome.rejected;
    else ++outcome.failed;
  }
  report["tasks"] = jt;
  report["summary"] = {{"passed", outcome.passed}, {"failed", outcome.failed}, {"rejected", outcome.rejected}};
  report["timing_seconds"] = timing;
  outcome.report = options.out_dir / "report.json";
  write_atomic(outcome.report, report.dump(2) + "\n");
  outcome.exit_code = outcome.failed > 0 ? 1 : outcome.rejected > 0 ? 2 : 0;
  return outcome;
}

// --- plots ------------------------------------------------------------------------

namespace {

HeatmapOptions heat_options(const GalleryInstance& gi, const std::string& title) {
  HeatmapOptions o;
  o.title = title;
  for (VertexId v : gi.domain.boundary())
    if (!gi.domain.on_frame(v)) o.boundary.push_back(v);
  if (gi.builder == "slit_grid") o.segments.push_back({-1.0, 0.0, 0.0, 0.0});
  return o;
}

VertexFunction restricted(std::size_t n, const VertexSet& dom, const Eigen::VectorXd& local) {
  VertexFunction f = VertexFunction::Constant(static_cast<Eigen::Index>(n), NAN);
  for (std::size_t i = 0; i < dom.size(); ++i) f[dom[i]] = local[static_cast<Eigen::Index>(i)];
  return f;
}

const std::set<std::string> kBhpKinds{"bhp", "cross-ratio", "gc1", "annulus"};

}  // namespace

std::vector<fs::path> plot_report(const fs::path& report_path, const std::string& what, const std::string& task,
                                  const fs::path& out) {
  json report;
  try {
    report = json::parse(read_file(report_path));
  } catch (const json::exception& e) {
    fail(ErrorKind::ConfigParse, report_path.string() + ": " + e.what());
  }
  if (what != "green-heatmap" && what != "kernel-heatmap" && what != "constants-vs-scale")
    fail(ErrorKind::ConfigParse, "unknown plot '" + what + "'");
  const fs::path dir = report_path.parent_path();
  auto target = [&](const std::string& name) { return out.empty() ? dir / (safe_name(name) + "-" + what + ".svg") : out; };

  if (what == "constants-vs-scale") {
    std::vector<Series> series;
    for (const auto& t : report.at("tasks")) {
      if (!task.empty() && t["name"] != task) continue;
      if (!t.contains("scale")) continue;
      Series s;
      s.label = t["name"].get<std::string>() + " " + t["scale"]["label"].get<std::string>();
      for (const auto& p : t["scale"]["points"]) {
        if (!p["r"].is_number() || !p["value"].is_number()) continue;
        s.x.push_back(p["r"].get<double>());
        s.y.push_back(p["value"].get<double>());
      }
      series.push_back(std::move(s));
    }
    if (series.empty()) fail(ErrorKind::InvalidArgument, "no task in the report carries a scale table");
    const fs::path p = target(task.empty() ? "all" : task);
    write_atomic(p, scatter_svg(series, true, "constants vs scale", "r", "constant"));
    return {p};
  }

  const json* chosen = nullptr;
  for (const auto& t : report.at("tasks")) {
    if (!task.empty() && t["name"] != task) continue;
    const auto kind = t["kind"].get<std::string>();
    const bool usable = what == "green-heatmap" ? (kBhpKinds.count(kind) || kind == "green-compare")
                                                : (kind == "bhp" || kind == "ehi-scan");
    if (usable) {
      chosen = &t;
      break;
    }
  }
  if (!chosen) fail(ErrorKind::InvalidArgument, "no task in the report supports " + what);
  const json& t = *chosen;
  const auto name = t["name"].get<std::string>();
  const GalleryInstance gi = load_instance(t["instance_spec"], fs::path(report.value("config_dir", ".")));
  const auto& g = gi.domain.graph();
  if (!g.has_coords()) fail(ErrorKind::MissingCoordinates, "the graph of task '" + name + "' has no coordinates");
  const json& spec = t["spec"];
  const auto kind = t["kind"].get<std::string>();
  const double r0 = spec.contains("radii") ? spec["radii"][0].get<double>() : 1.0;
  std::string svg;

  if (what == "green-heatmap") {
    if (kind == "green-compare") {
      const VertexId x0 = resolve(gi, spec.value("center", json("center")));
      const DirichletSolver s(g, open_ball(g, x0, spec.value("A1", 2.0) * r0));
      auto o = heat_options(gi, name + ": Green function of B(x0, A1 r)");
      o.markers.push_back({x0, "x0"});
      svg = heatmap_svg(g, restricted(g.vertex_count(), s.omega(), s.green_column(x0)), o);
    } else {
      const BhpConfig cfg = bhp_config(gi, spec, r0);
      const auto sp = special_points(cfg);
      const DirichletSolver s(g, gi.domain.inner_ball(cfg.xi, cfg.constants().A4 * cfg.r));
      auto o = heat_options(gi, name + ": g_D(x*, .) with D = B_U(xi, A4 r), r = " + cnum(r0));
      o.markers = {{cfg.xi, "xi"}, {sp.x_star, "x*"}, {sp.y_star, "y*"}, {sp.z_star, "z*"}};
      svg = heatmap_svg(g, restricted(g.vertex_count(), s.omega(), s.green_column(sp.x_star)), o);
    }
  } else {
    if (kind == "bhp") {
      const BhpConfig cfg = bhp_config(gi, spec, r0);
      const auto m = bhp_constant(cfg);
      if (m.trivial_cone) fail(ErrorKind::EmptyFreeBoundary, "the cone is trivial; nothing to plot");
      const DirichletSolver s(g, gi.domain.inner_ball(cfg.xi, cfg.constants().A0 * cfg.r));
      auto o = heat_options(gi, name + ": K(., z) on B_U(xi, A0 r), r = " + cnum(r0));
      o.markers = {{cfg.xi, "xi"}, {m.witness.z, "z"}, {m.witness.x, "x"}, {m.witness.y, "y"}};
      svg = heatmap_svg(g, restricted(g.vertex_count(), s.omega(), s.kernel_column(m.witness.z)), o);
    } else {
      VertexId c = 0;
      const json centers = spec.value("centers", json::array({"center"}));
      c = resolve(gi, centers[0]);
      const auto e = ehi_constant(g, c, r0, spec.value("delta", 0.5));
      const DirichletSolver s(g, open_ball(g, c, r0));
      auto o = heat_options(gi, name + ": K(., z) on B(c, R), R = " + cnum(r0));
      o.markers = {{c, "c"}, {e.z, "z"}};
      svg = heatmap_svg(g, restricted(g.vertex_count(), s.omega(), s.kernel_column(e.z)), o);
    }
  }
  const fs::path p = target(name);
  write_atomic(p, svg);
  return {p};
}

std::string emit_gallery(const std::string& builder, const std::map<std::string, double>& params) {
  return gallery_to_json(build_gallery(builder, params));
}

}  // namespace harnack::lab
