#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "harnack/domain.hpp"
#include "harnack/graph.hpp"

namespace harnack {

/// A built example space: the ambient lattice, the carved domain (closure
/// graph with duplicated slit sides, frame marked), and the parameters that
/// reproduce it.
struct GalleryInstance {
  std::shared_ptr<const WeightedGraph> graph;  ///< ambient graph
  DomainView domain;
  std::string builder;
  std::map<std::string, double> params;
  double mesh = 1.0;
  std::string note;
  /// Named closure-graph vertices (e.g. "xi", "tip").
  std::map<std::string, VertexId> landmarks;

  VertexId landmark(std::string_view name) const;
  /// Closure-graph vertex with the given lattice coordinates (interior first).
  VertexId vertex_at(std::span<const double> coords) const;
};

/// PATH(n): vertices 0..n, unit weights, domain {1..n-1} with boundary {0, n}.
GalleryInstance build_path(int n);

/// nx x ny unit grid; domain = vertices off the outer frame. Frame corners
/// have no interior neighbour and are left out of the closure graph.
GalleryInstance build_grid(int nx, int ny);

/// Lattice [-N,N] x [0,N]; the row y = 0 is the Dirichlet boundary, the
/// other three sides are frame. Landmark "xi" is the origin.
GalleryInstance build_half_plane(int N);

/// Lattice on [-Nh, Nh]^2 with spacing h and the slit [-1,0] x {0} removed.
/// Slit vertices strictly between the endpoints are duplicated into top and
/// bottom copies; (-1,0) and the tip (0,0) stay single. Landmark "tip".
GalleryInstance build_slit_grid(int N, double h);

enum class DensityMean { Geometric, Arithmetic };
enum class Carve { Box, HalfPlane };

struct AlphaLatticeOptions {
  int dim = 2;
  int N = 8;
  double alpha = 0.0;
  int sign = 1;  ///< density (1+|x|^2)^{sign * alpha / 2}
  DensityMean mean = DensityMean::Geometric;
  Carve carve = Carve::Box;
};

/// Lattice [-N,N]^n with vertex density rho, edge weights from a mean of the
/// endpoint densities, and mu = rho. Landmark "origin" (and "xi" for the
/// half-plane carve, which is the origin on the boundary row).
GalleryInstance build_weighted_lattice_alpha(const AlphaLatticeOptions& options);

/// Interval (a, b) of a one-dimensional instance: interior strictly inside,
/// boundary {a, b}. Landmarks "a" and "b".
GalleryInstance build_interval_domain(const GalleryInstance& line, double a, double b);

/// Series subdivision of every closure edge into k pieces; new vertices are
/// interior, the boundary, frame and landmarks are kept.
GalleryInstance cable_refine(const GalleryInstance& inst, int k);

/// Builds by name: path(n), grid(nx, ny), half_plane(N), slit_grid(N, h),
/// alpha_lattice(dim, N, alpha, sign, arithmetic, half_plane),
/// interval(N, alpha, sign, a, b); an optional `cable_k` refines the result.
GalleryInstance build_gallery(const std::string& builder, const std::map<std::string, double>& params);

/// `{builder, params, mesh, note, landmarks, graph, domain}`.
std::string gallery_to_json(const GalleryInstance& inst);

}  // namespace harnack
