#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace harnack {

using VertexId = std::uint32_t;

/// Real values indexed like the vertices of a graph.
using VertexFunction = Eigen::VectorXd;

/// Sorted, duplicate-free list of vertex ids.
using VertexSet = std::vector<VertexId>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct EdgeSpec {
  VertexId x;
  VertexId y;
  double w;
};

/// Undirected edge stored once with x < y. `length` is the path length used by
/// graph metrics; conductance `w` is what the Dirichlet form sees.
struct Edge {
  VertexId x;
  VertexId y;
  double w;
  double length = 1.0;
};

struct Neighbor {
  VertexId v;
  double w;
  std::uint32_t edge;
};

enum class MeasurePolicy { Unit, Degree, Explicit };

/// Connected weighted graph (V, E, w) with vertex measure mu. Immutable after
/// construction; adjacency is kept in CSR form.
class WeightedGraph {
 public:
  WeightedGraph(std::size_t vertex_count, std::vector<Edge> edges, std::vector<double> measure,
                std::vector<double> coords = {}, std::size_t coord_dim = 0);

  std::size_t vertex_count() const noexcept { return measure_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }
  const Edge& edge(std::uint32_t e) const { return edges_[e]; }

  std::span<const Neighbor> neighbors(VertexId x) const noexcept {
    return {adjacency_.data() + offsets_[x], adjacency_.data() + offsets_[x + 1]};
  }
  std::size_t degree_count(VertexId x) const noexcept { return offsets_[x + 1] - offsets_[x]; }

  /// w_x = sum of incident conductances.
  double weight(VertexId x) const noexcept { return vertex_weight_[x]; }
  std::span<const double> weights() const noexcept { return vertex_weight_; }

  double measure(VertexId x) const noexcept { return measure_[x]; }
  std::span<const double> measure() const noexcept { return measure_; }

  bool has_coords() const noexcept { return coord_dim_ > 0; }
  std::size_t coord_dim() const noexcept { return coord_dim_; }
  std::span<const double> coord(VertexId x) const noexcept {
    return {coords_.data() + x * coord_dim_, coord_dim_};
  }
  std::span<const double> coords() const noexcept { return coords_; }

  double min_edge_length() const noexcept { return min_length_; }
  double max_edge_length() const noexcept { return max_length_; }

  /// Edge index joining x and y, or -1.
  std::int64_t find_edge(VertexId x, VertexId y) const noexcept;

 private:
  std::vector<Edge> edges_;
  std::vector<double> measure_;
  std::vector<double> vertex_weight_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
  std::vector<double> coords_;
  std::size_t coord_dim_ = 0;
  double min_length_ = 0.0;
  double max_length_ = 0.0;
};

/// Builds a graph from an edge list; the vertex count is one past the largest id.
WeightedGraph build_graph(std::span<const EdgeSpec> edges, MeasurePolicy policy = MeasurePolicy::Degree,
                          std::span<const double> explicit_measure = {});

/// E(f,f) = sum over edges of w_e (f(x) - f(y))^2.
double dirichlet_energy(const WeightedGraph& g, const VertexFunction& f);

/// Bilinear form E(f,h).
double dirichlet_form(const WeightedGraph& g, const VertexFunction& f, const VertexFunction& h);

/// Lf(x) = mu(x)^-1 sum_y w_xy (f(y) - f(x)).
VertexFunction laplacian_apply(const WeightedGraph& g, const VertexFunction& f);

enum class CableMeasure {
  Retain,    ///< original vertices keep mu, new vertices get w/k
  CableMass  ///< every vertex gets w_e/(2k) per incident sub-segment
};

struct Subdivision {
  WeightedGraph graph;
  /// For vertex ids >= original count: index of the original edge it sits on.
  std::vector<std::uint32_t> parent_edge;
  std::size_t original_vertex_count = 0;
};

/// Replaces every edge by a series path of k edges of conductance k*w and
/// length length/k. Original vertices keep their ids.
Subdivision cable_subdivide_detailed(const WeightedGraph& g, int k,
                                     CableMeasure policy = CableMeasure::Retain);
WeightedGraph cable_subdivide(const WeightedGraph& g, int k, CableMeasure policy = CableMeasure::Retain);

/// p0 = min over directed adjacent pairs of w_xy / w_x.
double controlled_weights_constant(const WeightedGraph& g);

WeightedGraph rescale(const WeightedGraph& g, double weight_factor, double measure_factor);
WeightedGraph rescale(const WeightedGraph& g, double weight_factor, std::span<const double> measure_factors);

/// Graph with vertex v renamed to perm[v].
WeightedGraph relabel(const WeightedGraph& g, std::span<const VertexId> perm);

// --- metric helpers -------------------------------------------------------

struct ShortestPaths {
  std::vector<double> distance;
  std::vector<std::int64_t> parent;  ///< -1 at sources and unreached vertices
};

/// Multi-source Dijkstra over edge lengths. Every vertex can be reached, but a
/// search only continues out of vertices with pass[v] != 0 (sources always
/// expand). Empty `pass` allows everything. Stops at `max_distance`.
ShortestPaths shortest_paths(const WeightedGraph& g, std::span<const VertexId> sources,
                             std::span<const char> pass = {}, double max_distance = kInfinity);

std::vector<double> shortest_distances(const WeightedGraph& g, std::span<const VertexId> sources,
                                       std::span<const char> pass = {}, double max_distance = kInfinity);

std::vector<VertexId> extract_path(const ShortestPaths& sp, VertexId target);

/// {y : d(center, y) < r} in the plain graph metric.
VertexSet open_ball(const WeightedGraph& g, VertexId center, double r);
/// {y : d(center, y) <= r}.
VertexSet closed_ball(const WeightedGraph& g, VertexId center, double r);

/// Vertices outside `set` adjacent to it.
VertexSet vertex_boundary(const WeightedGraph& g, std::span<const VertexId> set);

VertexSet make_set(std::vector<VertexId> ids);
std::vector<char> membership(std::size_t n, std::span<const VertexId> set);
bool is_connected_subset(const WeightedGraph& g, std::span<const VertexId> set);

/// Connected components of the subgraph induced by `set` (each sorted).
std::vector<VertexSet> components(const WeightedGraph& g, std::span<const VertexId> set);

}  // namespace harnack
