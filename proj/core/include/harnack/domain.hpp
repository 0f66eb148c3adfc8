#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "harnack/graph.hpp"

namespace harnack {

/// A domain U inside its closure graph: the graph's vertices split into the
/// interior U and the Dirichlet boundary (the completion boundary, with slit
/// sides already duplicated by the builder). The intrinsic metric is plain
/// shortest-path distance whose intermediate vertices stay in U.
///
/// Copies share the metric caches; cache fills are synchronized.
class DomainView {
 public:
  DomainView(std::shared_ptr<const WeightedGraph> closure, VertexSet interior, VertexSet boundary);

  const WeightedGraph& graph() const noexcept { return *graph_; }
  const std::shared_ptr<const WeightedGraph>& graph_ptr() const noexcept { return graph_; }
  const VertexSet& interior() const noexcept { return interior_; }
  const VertexSet& boundary() const noexcept { return boundary_; }
  bool in_interior(VertexId v) const noexcept { return v < mask_.size() && mask_[v]; }
  bool on_boundary(VertexId v) const noexcept { return v < mask_.size() && !mask_[v]; }
  std::span<const char> interior_mask() const noexcept { return mask_; }

  /// Largest edge length of the closure graph.
  double mesh() const noexcept { return graph_->max_edge_length(); }

  /// Boundary vertices that only exist because a larger space was truncated
  /// to a finite patch.
  const VertexSet& frame() const noexcept { return frame_; }
  bool on_frame(VertexId v) const noexcept;
  void set_frame(VertexSet frame);

  /// Optional ambient graph with a projection closure-vertex -> ambient-vertex.
  void set_ambient(std::shared_ptr<const WeightedGraph> ambient, std::vector<VertexId> projection);
  bool has_ambient() const noexcept { return ambient_ != nullptr; }
  const WeightedGraph& ambient() const;
  VertexId project(VertexId v) const;

  /// Single-source d_U table over the closure graph (cached).
  std::shared_ptr<const std::vector<double>> distances_from(VertexId source) const;
  double distance(VertexId x, VertexId y) const;

  /// delta_U(x) = d_U(x, boundary); zero on boundary vertices.
  std::span<const double> delta() const;
  double delta(VertexId x) const { return delta()[x]; }

  /// {y in U : d_U(center, y) < r}
  VertexSet inner_ball(VertexId center, double r) const;
  /// {y in U : d_U(center, y) <= r}
  VertexSet inner_closed_ball(VertexId center, double r) const;
  /// {y in U : s <= d_U(center, y) < s + width}
  VertexSet inner_shell(VertexId center, double s, double width) const;

 private:
  struct Cache;
  std::shared_ptr<const WeightedGraph> graph_;
  VertexSet interior_;
  VertexSet boundary_;
  std::vector<char> mask_;
  VertexSet frame_;
  std::shared_ptr<const WeightedGraph> ambient_;
  std::vector<VertexId> projection_;
  std::shared_ptr<Cache> cache_;
};

DomainView domain_view(std::shared_ptr<const WeightedGraph> closure, VertexSet interior, VertexSet boundary);
DomainView domain_view(const WeightedGraph& closure, VertexSet interior, VertexSet boundary);

double intrinsic_distance(const DomainView& dv, VertexId x, VertexId y);
VertexSet inner_ball(const DomainView& dv, VertexId center, double r);

/// True when the closed inner ball {d_U(center, .) <= r} reaches a frame vertex,
/// i.e. the ball needs more of the space than the patch contains.
bool touches_frame(const DomainView& dv, VertexId center, double r);

// --- inner uniformity -----------------------------------------------------

enum class PairPolicy { Exhaustive, Sampled, Auto };

struct PairSampling {
  PairPolicy policy = PairPolicy::Auto;
  std::size_t exhaustive_limit = 2500;  ///< Auto: exhaustive up to this many interior vertices
  std::size_t random_pairs = 200;
  std::size_t boundary_pairs = 200;  ///< pairs among vertices one mesh unit from the boundary
  std::uint64_t seed = 1;
};

/// The pairs a policy visits (exhaustive lists every unordered pair).
std::vector<std::pair<VertexId, VertexId>> sample_pairs(const DomainView& dv, const PairSampling& sampling);

/// Admissible set A(x,y,c) = {z in U : delta_U(z) >= c min(d_U(x,z), d_U(z,y))}
/// together with x and y.
std::vector<char> admissible_set(const DomainView& dv, VertexId x, VertexId y, double c);

/// Shortest path from x to y inside A(x,y,c); empty when none exists.
std::vector<VertexId> inner_uniform_path(const DomainView& dv, VertexId x, VertexId y, double c);
double path_length(const WeightedGraph& g, std::span<const VertexId> path);

enum class CertificateStatus { Certified, Refuted, SampledOnly };

struct PairRecord {
  VertexId x = 0;
  VertexId y = 0;
  double distance = 0.0;  ///< d_U(x, y)
  double length = 0.0;    ///< constrained path length, +inf when no admissible path
  bool accepted = false;
  std::vector<VertexId> path;  ///< kept for refuted pairs and the worst accepted pair
};

struct InnerUniformCertificate {
  double c = 0.0;
  double C = 0.0;
  CertificateStatus status = CertificateStatus::SampledOnly;
  std::size_t pairs_checked = 0;
  std::size_t failures = 0;
  double worst_ratio = 1.0;  ///< max length / d_U over checked pairs
  /// Every visited pair under sampling; under exhaustive checking only the
  /// failures and the worst accepted pair.
  std::vector<PairRecord> pairs;
};

InnerUniformCertificate inner_uniformity_check(const DomainView& dv, double c, double C,
                                               const PairSampling& sampling = {});

struct UniformityEstimate {
  double c = 0.0;
  double C = 0.0;
  /// (c, C(c)) for every c on the search grid; C is +inf when some pair has no
  /// admissible path within the cap.
  std::vector<std::pair<double, double>> table;
};

/// Scans c in {1, 1/2, ..., 1/64}, computes C(c) as the worst ratio, and keeps
/// the smallest C (ties go to the larger c).
UniformityEstimate estimate_inner_uniformity_constants(const DomainView& dv, const PairSampling& sampling = {},
                                                       double ratio_cap = 32.0);

// --- far points and chains ------------------------------------------------

/// Vertex at inner distance `distance` from xi (within one mesh unit) with
/// delta_U >= clearance - mesh: argmax of delta_U over the shell
/// [distance, distance + mesh), else over the +-mesh window; ties to the
/// smaller id.
VertexId far_point_at(const DomainView& dv, VertexId xi, double distance, double clearance);

/// x_r with d_U(xi, x_r) ~ r/4 and delta_U(x_r) >= c_U r/4.
VertexId far_point(const DomainView& dv, VertexId xi, double r, double c_U);

struct ChainBall {
  VertexId center = 0;
  double radius = 0.0;
};

struct HarnackChain {
  std::size_t length = 0;
  std::vector<ChainBall> balls;
};

/// Shortest chain of balls B(c, r) inside U (r on the grid and r <= delta_U(c))
/// whose closed cores {d_U(c, .) <= r/M} link x to y, consecutive cores
/// meeting.
HarnackChain harnack_chain_length(const DomainView& dv, VertexId x, VertexId y, double M,
                                  std::span<const double> radius_grid);

/// {r_max, r_max/2, ..., r_max/2^(levels-1)}
std::vector<double> dyadic_radii(double r_max, int levels);

// --- serialization --------------------------------------------------------

std::string domain_to_json(const DomainView& dv, const std::string& graph_ref);
std::string certificate_to_json(const InnerUniformCertificate& cert);
std::string chain_to_json(const HarnackChain& chain);

}  // namespace harnack
