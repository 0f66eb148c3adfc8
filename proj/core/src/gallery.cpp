#include "harnack/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

#include <json.hpp>

#include "harnack/errors.hpp"
#include "harnack/graph_io.hpp"

namespace harnack {

namespace {

struct Carved {
  std::shared_ptr<const WeightedGraph> closure;
  VertexSet interior;
  VertexSet boundary;
  std::vector<VertexId> to_ambient;
  std::vector<std::int64_t> from_ambient;
};

/// Closure graph of an interior vertex set: the interior, its vertex boundary,
/// and every ambient edge with an interior endpoint.
Carved carve(const WeightedGraph& amb, const VertexSet& interior) {
  const std::size_t n = amb.vertex_count();
  const auto in = membership(n, interior);
  VertexSet keep = interior;
  const VertexSet bd = vertex_boundary(amb, interior);
  keep.insert(keep.end(), bd.begin(), bd.end());
  keep = make_set(std::move(keep));

  Carved c;
  c.from_ambient.assign(n, -1);
  for (std::size_t i = 0; i < keep.size(); ++i) c.from_ambient[keep[i]] = static_cast<std::int64_t>(i);
  c.to_ambient = keep;

  std::vector<Edge> edges;
  for (const auto& e : amb.edges()) {
    if (!in[e.x] && !in[e.y]) continue;
    edges.push_back({static_cast<VertexId>(c.from_ambient[e.x]), static_cast<VertexId>(c.from_ambient[e.y]), e.w,
                     e.length});
  }
  std::vector<double> mu, coords;
  const std::size_t dim = amb.coord_dim();
  for (VertexId v : keep) {
    mu.push_back(amb.measure(v));
    for (std::size_t d = 0; d < dim; ++d) coords.push_back(amb.coord(v)[d]);
  }
  c.closure = std::make_shared<const WeightedGraph>(keep.size(), std::move(edges), std::move(mu), std::move(coords), dim);
  for (VertexId v : interior) c.interior.push_back(static_cast<VertexId>(c.from_ambient[v]));
  for (VertexId v : bd) c.boundary.push_back(static_cast<VertexId>(c.from_ambient[v]));
  return c;
}

GalleryInstance assemble(std::shared_ptr<const WeightedGraph> ambient, Carved carved, std::string builder,
                         std::map<std::string, double> params, bool attach_ambient) {
  DomainView dv(carved.closure, std::move(carved.interior), std::move(carved.boundary));
  if (attach_ambient) dv.set_ambient(ambient, carved.to_ambient);
  GalleryInstance inst{std::move(ambient), std::move(dv), std::move(builder), std::move(params), 1.0, {}, {}};
  inst.mesh = inst.domain.mesh();
  return inst;
}

/// Square lattice [-N,N]^dim (indices), spacing h, density-derived weights.
struct Lattice {
  int dim;
  int N;
  int side() const { return 2 * N + 1; }
  std::size_t count() const { return dim == 1 ? side() : static_cast<std::size_t>(side()) * side(); }
  VertexId id(int i, int j = 0) const {
    return dim == 1 ? static_cast<VertexId>(i + N) : static_cast<VertexId>((j + N) * side() + (i + N));
  }
  int ix(VertexId v) const { return dim == 1 ? static_cast<int>(v) - N : static_cast<int>(v % side()) - N; }
  int iy(VertexId v) const { return dim == 1 ? 0 : static_cast<int>(v / side()) - N; }
};

template <class Density>
std::shared_ptr<const WeightedGraph> lattice_graph(const Lattice& lat, double h, Density&& rho, DensityMean mean,
                                                   bool mu_from_density) {
  std::vector<Edge> edges;
  std::vector<double> coords;
  std::vector<double> dens(lat.count());
  for (VertexId v = 0; v < lat.count(); ++v) {
    dens[v] = rho(lat.ix(v), lat.iy(v));
    coords.push_back(lat.ix(v) * h);
    if (lat.dim == 2) coords.push_back(lat.iy(v) * h);
  }
  auto weight = [&](VertexId a, VertexId b) {
    return mean == DensityMean::Geometric ? std::sqrt(dens[a] * dens[b]) : 0.5 * (dens[a] + dens[b]);
  };
  for (VertexId v = 0; v < lat.count(); ++v) {
    const int i = lat.ix(v), j = lat.iy(v);
    if (i < lat.N) edges.push_back({v, lat.id(i + 1, j), weight(v, lat.id(i + 1, j)), h});
    if (lat.dim == 2 && j < lat.N) edges.push_back({v, lat.id(i, j + 1), weight(v, lat.id(i, j + 1)), h});
  }
  std::vector<double> mu(lat.count(), 0.0);
  if (mu_from_density) {
    mu = dens;
  } else {
    for (const auto& e : edges) {
      mu[e.x] += e.w;
      mu[e.y] += e.w;
    }
  }
  return std::make_shared<const WeightedGraph>(lat.count(), std::move(edges), std::move(mu), std::move(coords),
                                               static_cast<std::size_t>(lat.dim));
}

VertexSet frame_of(const Carved& c, const std::function<bool(VertexId)>& is_frame_ambient) {
  VertexSet out;
  for (VertexId b : c.boundary)
    if (is_frame_ambient(c.to_ambient[b])) out.push_back(b);
  return out;
}

VertexId closure_id(const Carved& c, VertexId ambient_id) {
  const auto v = c.from_ambient.at(ambient_id);
  if (v < 0) fail(ErrorKind::InvalidArgument, "landmark is not part of the domain closure");
  return static_cast<VertexId>(v);
}

void check_size(bool ok, const std::string& what) {
  if (!ok) fail(ErrorKind::InvalidArgument, what);
}

}  // namespace

VertexId GalleryInstance::landmark(std::string_view name) const {
  auto it = landmarks.find(std::string(name));
  if (it == landmarks.end()) fail(ErrorKind::InvalidArgument, "instance has no landmark '" + std::string(name) + "'");
  return it->second;
}

VertexId GalleryInstance::vertex_at(std::span<const double> coords) const {
  const auto& g = domain.graph();
  if (!g.has_coords() || coords.size() != g.coord_dim()) fail(ErrorKind::MissingCoordinates, "coordinate lookup failed");
  std::int64_t found = -1;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    bool same = true;
    for (std::size_t d = 0; d < coords.size(); ++d) same = same && std::abs(g.coord(v)[d] - coords[d]) < 1e-9;
    if (!same) continue;
    if (domain.in_interior(v)) return v;
    if (found < 0) found = v;
  }
  if (found < 0) fail(ErrorKind::InvalidArgument, "no vertex at the requested coordinates");
  return static_cast<VertexId>(found);
}

GalleryInstance build_path(int n) {
  check_size(n >= 2, "path needs n >= 2");
  std::vector<EdgeSpec> spec;
  for (int i = 0; i < n; ++i) spec.push_back({static_cast<VertexId>(i), static_cast<VertexId>(i + 1), 1.0});
  const WeightedGraph base = build_graph(spec, MeasurePolicy::Degree);
  std::vector<double> coords;
  for (int i = 0; i <= n; ++i) coords.push_back(i);
  auto amb = std::make_shared<const WeightedGraph>(base.vertex_count(), std::vector<Edge>(base.edges().begin(), base.edges().end()),
                                                   std::vector<double>(base.measure().begin(), base.measure().end()),
                                                   std::move(coords), 1);
  VertexSet interior;
  for (int i = 1; i < n; ++i) interior.push_back(static_cast<VertexId>(i));
  Carved c = carve(*amb, interior);
  auto inst = assemble(amb, std::move(c), "path", {{"n", n}}, true);
  inst.landmarks = {{"a", 0}, {"b", static_cast<VertexId>(n)}};
  return inst;
}

GalleryInstance build_grid(int nx, int ny) {
  check_size(nx >= 3 && ny >= 3, "grid needs both sizes >= 3 so the interior is nonempty");
  std::vector<Edge> edges;
  std::vector<double> coords;
  auto id = [&](int i, int j) { return static_cast<VertexId>(j * nx + i); };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      coords.push_back(i);
      coords.push_back(j);
      if (i + 1 < nx) edges.push_back({id(i, j), id(i + 1, j), 1.0, 1.0});
      if (j + 1 < ny) edges.push_back({id(i, j), id(i, j + 1), 1.0, 1.0});
    }
  std::vector<double> mu(static_cast<std::size_t>(nx) * ny, 0.0);
  for (const auto& e : edges) {
    mu[e.x] += 1.0;
    mu[e.y] += 1.0;
  }
  auto amb = std::make_shared<const WeightedGraph>(mu.size(), std::move(edges), std::move(mu), std::move(coords), 2);
  VertexSet interior;
  for (int j = 1; j + 1 < ny; ++j)
    for (int i = 1; i + 1 < nx; ++i) interior.push_back(id(i, j));
  Carved c = carve(*amb, interior);
  VertexSet frame = c.boundary;
  const VertexId center = closure_id(c, id(nx / 2, ny / 2));
  auto inst = assemble(amb, std::move(c), "grid", {{"nx", nx}, {"ny", ny}}, true);
  inst.domain.set_frame(std::move(frame));
  inst.landmarks = {{"center", center}};
  return inst;
}

namespace {

GalleryInstance half_plane_on(std::shared_ptr<const WeightedGraph> amb, const Lattice& lat, std::string builder,
                              std::map<std::string, double> params) {
  VertexSet interior;
  for (VertexId v = 0; v < lat.count(); ++v)
    if (std::abs(lat.ix(v)) < lat.N && lat.iy(v) > 0 && lat.iy(v) < lat.N) interior.push_back(v);
  Carved c = carve(*amb, interior);
  VertexSet frame = frame_of(c, [&](VertexId a) { return lat.iy(a) > 0 || std::abs(lat.ix(a)) == lat.N; });
  const VertexId xi = closure_id(c, lat.id(0, 0));
  auto inst = assemble(std::move(amb), std::move(c), std::move(builder), std::move(params), true);
  inst.domain.set_frame(std::move(frame));
  inst.landmarks = {{"xi", xi}};
  return inst;
}

}  // namespace

GalleryInstance build_half_plane(int N) {
  check_size(N >= 2, "half plane needs N >= 2");
  const Lattice lat{2, N};
  auto amb = lattice_graph(lat, 1.0, [](int, int) { return 1.0; }, DensityMean::Geometric, false);
  auto inst = half_plane_on(amb, lat, "half_plane", {{"N", N}});
  return inst;
}

GalleryInstance build_slit_grid(int N, double h) {
  if (!(h > 0.0)) fail(ErrorKind::BadMesh, "mesh must be positive");
  const double inv = 1.0 / h;
  const int m = static_cast<int>(std::lround(inv));
  if (m < 1 || std::abs(inv - m) > 1e-9) fail(ErrorKind::BadMesh, "mesh must divide the slit length 1");
  if (N * h < 4.0 - 1e-12) fail(ErrorKind::BadMesh, "patch half-width N*h must be at least 4");
  if (N <= m + 1) fail(ErrorKind::BadMesh, "patch must contain the slit");

  const Lattice lat{2, N};
  auto amb = lattice_graph(lat, h, [](int, int) { return 1.0; }, DensityMean::Geometric, false);

  auto on_frame = [&](int i, int j) { return std::abs(i) == N || std::abs(j) == N; };
  auto corner = [&](int i, int j) { return std::abs(i) == N && std::abs(j) == N; };
  auto on_slit = [&](int i, int j) { return j == 0 && i >= -m && i <= 0; };
  auto doubled = [&](int i, int j) { return j == 0 && i > -m && i < 0; };

  // closure ids: one per kept ambient vertex, two for doubled slit vertices
  std::vector<std::int64_t> first(lat.count(), -1);
  std::vector<VertexId> to_ambient;
  VertexSet interior, boundary, frame;
  std::vector<double> coords, mu;
  for (VertexId a = 0; a < lat.count(); ++a) {
    const int i = lat.ix(a), j = lat.iy(a);
    if (corner(i, j)) continue;
    const int copies = doubled(i, j) ? 2 : 1;
    first[a] = static_cast<std::int64_t>(to_ambient.size());
    for (int k = 0; k < copies; ++k) {
      const auto v = static_cast<VertexId>(to_ambient.size());
      to_ambient.push_back(a);
      coords.push_back(i * h);
      coords.push_back(j * h);
      if (on_frame(i, j)) {
        boundary.push_back(v);
        frame.push_back(v);
      } else if (on_slit(i, j)) {
        boundary.push_back(v);
      } else {
        interior.push_back(v);
      }
    }
  }
  auto interior_amb = [&](VertexId a) {
    const int i = lat.ix(a), j = lat.iy(a);
    return !on_frame(i, j) && !on_slit(i, j);
  };
  std::vector<Edge> edges;
  for (const auto& e : amb->edges()) {
    if (!interior_amb(e.x) && !interior_amb(e.y)) continue;
    auto map = [&](VertexId a, VertexId other) {
      const auto base = static_cast<VertexId>(first[a]);
      if (!doubled(lat.ix(a), lat.iy(a))) return base;
      return lat.iy(other) > 0 ? base : base + 1;  // top copy, then bottom copy
    };
    edges.push_back({map(e.x, e.y), map(e.y, e.x), e.w, e.length});
  }
  mu.assign(to_ambient.size(), 0.0);
  for (const auto& e : edges) {
    mu[e.x] += e.w;
    mu[e.y] += e.w;
  }
  auto closure = std::make_shared<const WeightedGraph>(to_ambient.size(), std::move(edges), std::move(mu),
                                                       std::move(coords), 2);
  DomainView dv(closure, std::move(interior), std::move(boundary));
  dv.set_ambient(amb, to_ambient);
  dv.set_frame(std::move(frame));
  GalleryInstance inst{amb, std::move(dv), "slit_grid", {{"N", N}, {"h", h}}, h, {}, {}};
  inst.note = "slit tip (0,0) and slit end (-1,0) are single boundary vertices; interior slit points are doubled";
  inst.landmarks = {{"tip", static_cast<VertexId>(first[lat.id(0, 0)])},
                    {"end", static_cast<VertexId>(first[lat.id(-m, 0)])}};
  return inst;
}

GalleryInstance build_weighted_lattice_alpha(const AlphaLatticeOptions& o) {
  check_size(o.dim == 1 || o.dim == 2, "alpha lattice dimension must be 1 or 2");
  check_size(o.N >= 8, "alpha lattice needs N >= 8");
  check_size(o.sign == 1 || o.sign == -1, "exponent sign must be +1 or -1");
  const Lattice lat{o.dim, o.N};
  const double expo = o.sign * o.alpha / 2.0;
  auto amb = lattice_graph(
      lat, 1.0, [&](int i, int j) { return std::pow(1.0 + double(i) * i + double(j) * j, expo); }, o.mean, true);
  std::map<std::string, double> params{{"dim", o.dim},
                                       {"N", o.N},
                                       {"alpha", o.alpha},
                                       {"sign", o.sign},
                                       {"arithmetic", o.mean == DensityMean::Arithmetic ? 1.0 : 0.0},
                                       {"half_plane", o.carve == Carve::HalfPlane ? 1.0 : 0.0}};
  if (o.carve == Carve::HalfPlane && o.dim == 2) return half_plane_on(amb, lat, "alpha_lattice", std::move(params));

  VertexSet interior;
  for (VertexId v = 0; v < lat.count(); ++v) {
    const int i = lat.ix(v), j = lat.iy(v);
    const bool inside = o.carve == Carve::HalfPlane ? (i > 0 && i < o.N)
                                                    : (std::abs(i) < o.N && (o.dim == 1 || std::abs(j) < o.N));
    if (inside) interior.push_back(v);
  }
  Carved c = carve(*amb, interior);
  VertexSet frame = frame_of(c, [&](VertexId a) { return std::abs(lat.ix(a)) == o.N || std::abs(lat.iy(a)) == o.N; });
  const VertexId origin = closure_id(c, lat.id(0, 0));
  auto inst = assemble(amb, std::move(c), "alpha_lattice", std::move(params), true);
  inst.domain.set_frame(std::move(frame));
  inst.landmarks = {{o.carve == Carve::HalfPlane ? "xi" : "origin", origin}};
  return inst;
}

GalleryInstance build_interval_domain(const GalleryInstance& line, double a, double b) {
  const auto& amb = *line.graph;
  if (amb.coord_dim() != 1) fail(ErrorKind::InvalidArgument, "interval domains need a one-dimensional instance");
  if (!(a < b)) fail(ErrorKind::InvalidArgument, "interval needs a < b");
  VertexSet interior;
  std::int64_t va = -1, vb = -1;
  for (VertexId v = 0; v < amb.vertex_count(); ++v) {
    const double x = amb.coord(v)[0];
    if (x > a + 1e-9 && x < b - 1e-9) interior.push_back(v);
    if (std::abs(x - a) < 1e-9) va = v;
    if (std::abs(x - b) < 1e-9) vb = v;
  }
  if (interior.empty()) fail(ErrorKind::EmptyInterior, "no lattice point strictly inside the interval");
  if (va < 0 || vb < 0) fail(ErrorKind::InvalidArgument, "interval endpoints must be lattice points");
  Carved c = carve(amb, interior);
  const VertexId ca = closure_id(c, static_cast<VertexId>(va));
  const VertexId cb = closure_id(c, static_cast<VertexId>(vb));
  auto params = line.params;
  params["a"] = a;
  params["b"] = b;
  auto inst = assemble(line.graph, std::move(c), "interval", std::move(params), true);
  inst.note = "interval of " + line.builder;
  inst.landmarks = {{"a", ca}, {"b", cb}};
  return inst;
}

GalleryInstance cable_refine(const GalleryInstance& inst, int k) {
  if (k < 1) fail(ErrorKind::InvalidArgument, "cable refinement needs k >= 1");
  if (k == 1) return inst;
  const auto& dv = inst.domain;
  Subdivision sub = cable_subdivide_detailed(dv.graph(), k);
  VertexSet interior = dv.interior();
  for (std::size_t v = sub.original_vertex_count; v < sub.graph.vertex_count(); ++v)
    interior.push_back(static_cast<VertexId>(v));
  auto closure = std::make_shared<const WeightedGraph>(std::move(sub.graph));
  DomainView refined(closure, std::move(interior), dv.boundary());
  refined.set_frame(dv.frame());
  auto params = inst.params;
  params["cable_k"] = k;
  GalleryInstance out{closure, std::move(refined), inst.builder, std::move(params), inst.mesh / k, inst.note,
                      inst.landmarks};
  return out;
}

GalleryInstance build_gallery(const std::string& builder, const std::map<std::string, double>& params) {
  auto get = [&](const char* key, std::optional<double> fallback = std::nullopt) {
    if (auto it = params.find(key); it != params.end()) return it->second;
    if (fallback) return *fallback;
    fail(ErrorKind::ConfigParse, "builder '" + builder + "' needs parameter '" + key + "'");
  };
  auto as_int = [&](const char* key, std::optional<double> fallback = std::nullopt) {
    return static_cast<int>(std::lround(get(key, fallback)));
  };
  GalleryInstance inst = [&]() -> GalleryInstance {
    if (builder == "path") return build_path(as_int("n"));
    if (builder == "grid") return build_grid(as_int("nx"), as_int("ny"));
    if (builder == "half_plane") return build_half_plane(as_int("N"));
    if (builder == "slit_grid") return build_slit_grid(as_int("N"), get("h", 1.0));
    if (builder == "alpha_lattice" || builder == "interval") {
      AlphaLatticeOptions o;
      o.dim = builder == "interval" ? 1 : as_int("dim", 2);
      o.N = as_int("N");
      o.alpha = get("alpha", 0.0);
      o.sign = as_int("sign", 1.0);
      o.mean = get("arithmetic", 0.0) != 0.0 ? DensityMean::Arithmetic : DensityMean::Geometric;
      o.carve = get("half_plane", 0.0) != 0.0 ? Carve::HalfPlane : Carve::Box;
      if (builder == "alpha_lattice") return build_weighted_lattice_alpha(o);
      o.carve = Carve::Box;
      return build_interval_domain(build_weighted_lattice_alpha(o), get("a"), get("b"));
    }
    fail(ErrorKind::ConfigParse, "unknown builder '" + builder + "'");
  }();
  if (auto it = params.find("cable_k"); it != params.end()) inst = cable_refine(inst, static_cast<int>(std::lround(it->second)));
  return inst;
}

std::string gallery_to_json(const GalleryInstance& inst) {
  nlohmann::json j;
  j["builder"] = inst.builder;
  j["params"] = inst.params;
  j["mesh"] = inst.mesh;
  if (!inst.note.empty()) j["note"] = inst.note;
  j["landmarks"] = inst.landmarks;
  j["graph"] = nlohmann::json::parse(write_graph_json(inst.domain.graph()));
  j["domain"] = nlohmann::json::parse(domain_to_json(inst.domain, "graph"));
  return j.dump();
}

}  // namespace harnack
