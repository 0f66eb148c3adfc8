#include "harnack/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>
#include <utility>

#include "harnack/errors.hpp"

namespace harnack {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

WeightedGraph::WeightedGraph(std::size_t vertex_count, std::vector<Edge> edges, std::vector<double> measure,
                             std::vector<double> coords, std::size_t coord_dim)
    : edges_(std::move(edges)), measure_(std::move(measure)), coords_(std::move(coords)), coord_dim_(coord_dim) {
  if (vertex_count == 0) fail(ErrorKind::InvalidArgument, "graph needs at least one vertex");
  if (measure_.size() != vertex_count) fail(ErrorKind::InvalidArgument, "measure length differs from vertex count");
  if (coord_dim_ > 0 && coords_.size() != vertex_count * coord_dim_)
    fail(ErrorKind::InvalidArgument, "coordinate table has the wrong size");
  if (coord_dim_ == 0 && !coords_.empty()) fail(ErrorKind::InvalidArgument, "coordinates given without a dimension");

  for (auto& e : edges_) {
    if (e.x == e.y) fail(ErrorKind::InvalidArgument, "self-loop at vertex " + std::to_string(e.x));
    if (e.x >= vertex_count || e.y >= vertex_count) fail(ErrorKind::InvalidArgument, "edge endpoint out of range");
    if (!positive_finite(e.w)) fail(ErrorKind::NonpositiveWeight, "edge weight must be positive and finite");
    if (!positive_finite(e.length)) fail(ErrorKind::NonpositiveWeight, "edge length must be positive and finite");
    if (e.x > e.y) std::swap(e.x, e.y);
  }
  for (std::size_t x = 0; x < vertex_count; ++x)
    if (!positive_finite(measure_[x])) fail(ErrorKind::InvalidArgument, "measure must be positive at every vertex");

  std::vector<std::size_t> count(vertex_count + 1, 0);
  for (const auto& e : edges_) {
    ++count[e.x + 1];
    ++count[e.y + 1];
  }
  offsets_.assign(vertex_count + 1, 0);
  for (std::size_t i = 0; i < vertex_count; ++i) offsets_[i + 1] = offsets_[i] + count[i + 1];
  adjacency_.resize(offsets_.back());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (std::uint32_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    adjacency_[cursor[e.x]++] = {e.y, e.w, i};
    adjacency_[cursor[e.y]++] = {e.x, e.w, i};
  }
  for (std::size_t x = 0; x < vertex_count; ++x) {
    auto first = adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[x]);
    auto last = adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[x + 1]);
    std::sort(first, last, [](const Neighbor& a, const Neighbor& b) { return a.v < b.v; });
    for (auto it = first; it != last && it + 1 != last; ++it)
      if (it->v == (it + 1)->v)
        fail(ErrorKind::DuplicateEdge, "duplicate edge " + std::to_string(x) + "-" + std::to_string(it->v));
  }

  vertex_weight_.assign(vertex_count, 0.0);
  for (const auto& e : edges_) {
    vertex_weight_[e.x] += e.w;
    vertex_weight_[e.y] += e.w;
  }
  if (vertex_count > 1) {
    for (std::size_t x = 0; x < vertex_count; ++x)
      if (!(vertex_weight_[x] > 0.0)) fail(ErrorKind::DisconnectedGraph, "vertex " + std::to_string(x) + " is isolated");
  }

  // connectivity
  std::vector<char> seen(vertex_count, 0);
  std::vector<VertexId> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    VertexId x = stack.back();
    stack.pop_back();
    for (const auto& nb : neighbors(x))
      if (!seen[nb.v]) {
        seen[nb.v] = 1;
        ++reached;
        stack.push_back(nb.v);
      }
  }
  if (reached != vertex_count) fail(ErrorKind::DisconnectedGraph, "graph is not connected");

  if (!edges_.empty()) {
    min_length_ = kInfinity;
    for (const auto& e : edges_) {
      min_length_ = std::min(min_length_, e.length);
      max_length_ = std::max(max_length_, e.length);
    }
  }
}

std::int64_t WeightedGraph::find_edge(VertexId x, VertexId y) const noexcept {
  auto nbrs = neighbors(x);
  auto it = std::lower_bound(nbrs.begin(), nbrs.end(), y, [](const Neighbor& n, VertexId v) { return n.v < v; });
  if (it != nbrs.end() && it->v == y) return it->edge;
  return -1;
}

WeightedGraph build_graph(std::span<const EdgeSpec> edge_list, MeasurePolicy policy,
                          std::span<const double> explicit_measure) {
  if (edge_list.empty()) fail(ErrorKind::InvalidArgument, "edge list is empty");
  VertexId max_id = 0;
  std::vector<Edge> edges;
  edges.reserve(edge_list.size());
  for (const auto& e : edge_list) {
    if (!positive_finite(e.w)) fail(ErrorKind::NonpositiveWeight, "edge weight must be positive and finite");
    max_id = std::max({max_id, e.x, e.y});
    edges.push_back({e.x, e.y, e.w, 1.0});
  }
  const std::size_t n = std::size_t{max_id} + 1;
  std::vector<double> measure(n, 1.0);
  if (policy == MeasurePolicy::Degree) {
    std::fill(measure.begin(), measure.end(), 0.0);
    for (const auto& e : edges) {
      measure[e.x] += e.w;
      measure[e.y] += e.w;
    }
    // isolated ids keep zero mass and are rejected below as disconnected
    for (auto& m : measure)
      if (m == 0.0) m = 1.0;
  } else if (policy == MeasurePolicy::Explicit) {
    if (explicit_measure.size() != n) fail(ErrorKind::InvalidArgument, "explicit measure has the wrong length");
    measure.assign(explicit_measure.begin(), explicit_measure.end());
  }
  return WeightedGraph(n, std::move(edges), std::move(measure));
}

double dirichlet_form(const WeightedGraph& g, const VertexFunction& f, const VertexFunction& h) {
  if (static_cast<std::size_t>(f.size()) != g.vertex_count() || static_cast<std::size_t>(h.size()) != g.vertex_count())
    fail(ErrorKind::InvalidArgument, "vertex function has the wrong length");
  double sum = 0.0;
  for (const auto& e : g.edges()) sum += e.w * (f[e.x] - f[e.y]) * (h[e.x] - h[e.y]);
  return sum;
}

double dirichlet_energy(const WeightedGraph& g, const VertexFunction& f) { return dirichlet_form(g, f, f); }

VertexFunction laplacian_apply(const WeightedGraph& g, const VertexFunction& f) {
  if (static_cast<std::size_t>(f.size()) != g.vertex_count())
    fail(ErrorKind::InvalidArgument, "vertex function has the wrong length");
  VertexFunction out = VertexFunction::Zero(f.size());
  for (const auto& e : g.edges()) {
    const double flow = e.w * (f[e.y] - f[e.x]);
    out[e.x] += flow;
    out[e.y] -= flow;
  }
  for (std::size_t x = 0; x < g.vertex_count(); ++x) out[x] /= g.measure(static_cast<VertexId>(x));
  return out;
}

Subdivision cable_subdivide_detailed(const WeightedGraph& g, int k, CableMeasure policy) {
  if (k < 1) fail(ErrorKind::InvalidArgument, "subdivision factor must be >= 1");
  const std::size_t n0 = g.vertex_count();
  if (k == 1 && policy == CableMeasure::Retain) {
    std::vector<Edge> edges(g.edges().begin(), g.edges().end());
    std::vector<double> mu(g.measure().begin(), g.measure().end());
    std::vector<double> coords(g.coords().begin(), g.coords().end());
    return {WeightedGraph(n0, std::move(edges), std::move(mu), std::move(coords), g.coord_dim()), {}, n0};
  }
  const std::size_t extra = g.edge_count() * static_cast<std::size_t>(k - 1);
  const std::size_t n = n0 + extra;
  const std::size_t dim = g.coord_dim();
  std::vector<double> mu(n, 0.0);
  std::vector<double> coords;
  if (dim > 0) {
    coords.assign(n * dim, 0.0);
    std::copy(g.coords().begin(), g.coords().end(), coords.begin());
  }
  if (policy == CableMeasure::Retain)
    for (std::size_t x = 0; x < n0; ++x) mu[x] = g.measure(static_cast<VertexId>(x));

  std::vector<Edge> edges;
  edges.reserve(g.edge_count() * static_cast<std::size_t>(k));
  std::vector<std::uint32_t> parent(extra);
  const double kk = static_cast<double>(k);
  VertexId next = static_cast<VertexId>(n0);
  for (std::uint32_t ei = 0; ei < g.edge_count(); ++ei) {
    const Edge& e = g.edge(ei);
    VertexId prev = e.x;
    for (int s = 1; s <= k; ++s) {
      VertexId cur;
      if (s == k) {
        cur = e.y;
      } else {
        cur = next++;
        parent[cur - n0] = ei;
        mu[cur] = e.w / kk;
        if (dim > 0) {
          const double t = s / kk;
          for (std::size_t d = 0; d < dim; ++d)
            coords[cur * dim + d] = (1.0 - t) * g.coord(e.x)[d] + t * g.coord(e.y)[d];
        }
      }
      edges.push_back({prev, cur, kk * e.w, e.length / kk});
      prev = cur;
    }
    if (policy == CableMeasure::CableMass) {
      mu[e.x] += e.w / (2.0 * kk);
      mu[e.y] += e.w / (2.0 * kk);
    }
  }
  return {WeightedGraph(n, std::move(edges), std::move(mu), std::move(coords), dim), std::move(parent), n0};
}

WeightedGraph cable_subdivide(const WeightedGraph& g, int k, CableMeasure policy) {
  return cable_subdivide_detailed(g, k, policy).graph;
}

double controlled_weights_constant(const WeightedGraph& g) {
  double p0 = 1.0;
  for (const auto& e : g.edges()) {
    p0 = std::min(p0, e.w / g.weight(e.x));
    p0 = std::min(p0, e.w / g.weight(e.y));
  }
  return p0;
}

WeightedGraph rescale(const WeightedGraph& g, double weight_factor, double measure_factor) {
  if (!positive_finite(measure_factor)) fail(ErrorKind::NonpositiveFactor, "measure factor must be positive");
  std::vector<double> factors(g.vertex_count(), measure_factor);
  return rescale(g, weight_factor, factors);
}

WeightedGraph rescale(const WeightedGraph& g, double weight_factor, std::span<const double> measure_factors) {
  if (!positive_finite(weight_factor)) fail(ErrorKind::NonpositiveFactor, "weight factor must be positive");
  if (measure_factors.size() != g.vertex_count())
    fail(ErrorKind::InvalidArgument, "measure factor list has the wrong length");
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  for (auto& e : edges) e.w *= weight_factor;
  std::vector<double> mu(g.vertex_count());
  for (std::size_t x = 0; x < mu.size(); ++x) {
    if (!positive_finite(measure_factors[x])) fail(ErrorKind::NonpositiveFactor, "measure factors must be positive");
    mu[x] = g.measure(static_cast<VertexId>(x)) * measure_factors[x];
  }
  std::vector<double> coords(g.coords().begin(), g.coords().end());
  return WeightedGraph(g.vertex_count(), std::move(edges), std::move(mu), std::move(coords), g.coord_dim());
}

WeightedGraph relabel(const WeightedGraph& g, std::span<const VertexId> perm) {
  const std::size_t n = g.vertex_count();
  if (perm.size() != n) fail(ErrorKind::InvalidArgument, "permutation has the wrong length");
  std::vector<Edge> edges;
  edges.reserve(g.edge_count());
  for (const auto& e : g.edges()) edges.push_back({perm[e.x], perm[e.y], e.w, e.length});
  std::vector<double> mu(n);
  std::vector<double> coords(g.coords().size());
  const std::size_t dim = g.coord_dim();
  for (std::size_t x = 0; x < n; ++x) {
    mu[perm[x]] = g.measure(static_cast<VertexId>(x));
    for (std::size_t d = 0; d < dim; ++d) coords[perm[x] * dim + d] = g.coord(static_cast<VertexId>(x))[d];
  }
  return WeightedGraph(n, std::move(edges), std::move(mu), std::move(coords), dim);
}

ShortestPaths shortest_paths(const WeightedGraph& g, std::span<const VertexId> sources, std::span<const char> pass,
                             double max_distance) {
  const std::size_t n = g.vertex_count();
  ShortestPaths sp{std::vector<double>(n, kInfinity), std::vector<std::int64_t>(n, -1)};
  using Item = std::pair<double, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  std::vector<char> is_source(n, 0);
  for (VertexId s : sources) {
    sp.distance[s] = 0.0;
    is_source[s] = 1;
    heap.push({0.0, s});
  }
  while (!heap.empty()) {
    auto [d, x] = heap.top();
    heap.pop();
    if (d > sp.distance[x]) continue;
    if (!is_source[x] && !pass.empty() && !pass[x]) continue;
    for (const auto& nb : g.neighbors(x)) {
      const double nd = d + g.edge(nb.edge).length;
      if (nd < sp.distance[nb.v] && nd <= max_distance) {
        sp.distance[nb.v] = nd;
        sp.parent[nb.v] = x;
        heap.push({nd, nb.v});
      }
    }
  }
  return sp;
}

std::vector<double> shortest_distances(const WeightedGraph& g, std::span<const VertexId> sources,
                                       std::span<const char> pass, double max_distance) {
  return shortest_paths(g, sources, pass, max_distance).distance;
}

std::vector<VertexId> extract_path(const ShortestPaths& sp, VertexId target) {
  std::vector<VertexId> path;
  if (!std::isfinite(sp.distance[target])) return path;
  for (std::int64_t v = target; v >= 0; v = sp.parent[static_cast<std::size_t>(v)])
    path.push_back(static_cast<VertexId>(v));
  std::reverse(path.begin(), path.end());
  return path;
}

VertexSet open_ball(const WeightedGraph& g, VertexId center, double r) {
  const VertexId src[] = {center};
  auto d = shortest_distances(g, src, {}, r);
  VertexSet out;
  for (std::size_t v = 0; v < d.size(); ++v)
    if (d[v] < r) out.push_back(static_cast<VertexId>(v));
  return out;
}

VertexSet closed_ball(const WeightedGraph& g, VertexId center, double r) {
  const VertexId src[] = {center};
  auto d = shortest_distances(g, src, {}, r);
  VertexSet out;
  for (std::size_t v = 0; v < d.size(); ++v)
    if (d[v] <= r) out.push_back(static_cast<VertexId>(v));
  return out;
}

VertexSet vertex_boundary(const WeightedGraph& g, std::span<const VertexId> set) {
  auto in = membership(g.vertex_count(), set);
  std::vector<char> mark(g.vertex_count(), 0);
  VertexSet out;
  for (VertexId x : set)
    for (const auto& nb : g.neighbors(x))
      if (!in[nb.v] && !mark[nb.v]) {
        mark[nb.v] = 1;
        out.push_back(nb.v);
      }
  std::sort(out.begin(), out.end());
  return out;
}

VertexSet make_set(std::vector<VertexId> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::vector<char> membership(std::size_t n, std::span<const VertexId> set) {
  std::vector<char> m(n, 0);
  for (VertexId v : set) {
    if (v >= n) fail(ErrorKind::InvalidArgument, "vertex id out of range");
    m[v] = 1;
  }
  return m;
}

std::vector<VertexSet> components(const WeightedGraph& g, std::span<const VertexId> set) {
  auto in = membership(g.vertex_count(), set);
  std::vector<char> seen(g.vertex_count(), 0);
  std::vector<VertexSet> out;
  for (VertexId s : set) {
    if (seen[s]) continue;
    VertexSet comp;
    std::vector<VertexId> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      VertexId x = stack.back();
      stack.pop_back();
      comp.push_back(x);
      for (const auto& nb : g.neighbors(x))
        if (in[nb.v] && !seen[nb.v]) {
          seen[nb.v] = 1;
          stack.push_back(nb.v);
        }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

bool is_connected_subset(const WeightedGraph& g, std::span<const VertexId> set) {
  if (set.empty()) return true;
  return components(g, set).size() == 1;
}

}  // namespace harnack
