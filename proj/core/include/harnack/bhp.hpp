#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "harnack/domain.hpp"
#include "harnack/potential.hpp"
#include "harnack/solver.hpp"

namespace harnack {

struct BhpConstants {
  double A0 = 0.0;
  double A2 = 0.0;
  double A3 = 0.0;
  double A4 = 0.0;
  double A5 = 0.0;
};

/// A2 = 2(12 + C_U), A3 = max(2 + 2/c_U, 7), A4 = A2 + C_U(A3 + c_U^2/4 + 8),
/// A5 = A3 + A4 and A0 = A5.
BhpConstants default_bhp_constants(double c_U, double C_U);

struct BhpConfig {
  DomainView domain;
  VertexId xi = 0;
  double r = 8.0;
  double c_U = 0.25;
  double C_U = 2.0;
  /// Overrides; anything unset falls back to default_bhp_constants (A4 and A5
  /// are recomputed from the resolved A2, A3).
  std::optional<double> A0{}, A2{}, A3{}, A4{};
  /// F = B_U(xi, (A3 + w) r) minus B_U(xi, (A3 - w) r).
  double annulus_half_width = 3.0;
  SolverOptions solver{};

  BhpConstants constants() const;
};

/// Throws ConfigRejected when r < 4 mesh, xi is not a (non-frame) boundary
/// vertex, the largest ball used reaches the patch frame, or (bounded domain
/// without frame) r > diam(U) / (4 A0 C_U).
void validate(const BhpConfig& cfg);

struct BhpWitness {
  double ratio = 1.0;
  VertexId x = 0;
  VertexId y = 0;
  VertexId z = 0;        ///< column maximizing K(x,.)/K(y,.)
  VertexId z_prime = 0;  ///< column maximizing K(y,.)/K(x,.)
  std::optional<VertexId> x_star, y_star, z_star, xi_r, xi_r_prime;
};

/// Kernel columns of D = B_U(xi, A0 r) for the free boundary of D (vertices
/// of its vertex boundary lying in U). Rows default to B_U(xi, r).
/// Throws EmptyFreeBoundary when every boundary vertex of D is in the
/// boundary of U.
KernelCone boundary_kernel_cone(const BhpConfig& cfg, std::optional<VertexSet> rows = std::nullopt);

struct BhpMeasurement {
  double C1 = 1.0;
  bool trivial_cone = false;  ///< empty free boundary; C1 is 1 by convention
  std::size_t skipped_columns = 0;
  BhpWitness witness;
  KernelCone cone;
  BhpConstants constants;
};

BhpMeasurement bhp_constant(const BhpConfig& cfg);

/// (K(x,z)/K(y,z)) (K(y,z')/K(x,z')) read from the stored kernel.
double witness_ratio(const KernelCone& cone, const BhpWitness& w);

struct GreenCrossRatio {
  double value = 1.0;
  VertexId x1 = 0, x2 = 0, y1 = 0, y2 = 0;
  /// g_D on rows B_U(xi, r) and columns at the discrete A3 r sphere.
  KernelCone green;
};

/// max over x1, x2 in B_U(xi, r) and y1, y2 on U cap the A3 r sphere of
/// g(x1,y1) g(x2,y2) / (g(x2,y1) g(x1,y2)), D = B_U(xi, A4 r). All quadruples
/// are visited (the maximum separates over columns). Throws EmptySphere.
GreenCrossRatio green_cross_ratio(const BhpConfig& cfg);

/// The same quantity for one quadruple read from a table.
double cross_ratio(const KernelCone& green, VertexId x1, VertexId x2, VertexId y1, VertexId y2);

struct SpecialPoints {
  VertexId x_star = 0;
  VertexId y_star = 0;
  VertexId z_star = 0;
  std::vector<VertexId> curve;  ///< constrained path from y* to x*
};

/// x* on the r sphere with delta >= c_U r - mesh, y* on the A3 r sphere with
/// delta >= A3 c_U r - mesh (argmax delta, ties to the smaller id) and z* the
/// last vertex of the inner uniform path y* -> x* on the c_U r sphere around
/// y*. Throws NoSpecialPoint.
SpecialPoints special_points(const BhpConfig& cfg);

struct Gc1Row {
  VertexId x = 0;
  VertexId y = 0;
  double ratio = 1.0;  ///< g(x,y) g(x*,y*) / (g(x*,y) g(x,y*))
  bool far = false;    ///< delta(y) >= c_U^2 r / 4
};

struct Gc1Report {
  SpecialPoints points;
  double far_min = kInfinity, far_max = 0.0;
  double near_min = kInfinity, near_max = 0.0;
  std::size_t far_count = 0, near_count = 0;
  double spread = 1.0;  ///< overall max / overall min
  std::vector<Gc1Row> rows;
};

/// Tabulates the two-sided comparison of g_D(x,y) with
/// g_D(x*,y) g_D(x,y*) / g_D(x*,y*) for x in B_U(xi, r) and y on the A3 r
/// sphere, D = B_U(xi, A4 r).
Gc1Report gc1_decomposition_check(const BhpConfig& cfg);

struct CurveCheck {
  VertexId y1 = 0;
  VertexId y2 = 0;
  double distance = 0.0;
  double length = kInfinity;
  bool certified = false;  ///< length <= C_U distance
  double min_distance = 0.0;  ///< min d_U(xi, .) along the curve
  double max_distance = 0.0;
  bool avoids_inner = false;
  bool stays_inside = false;
};

struct AnnulusReport {
  double max_ratio = 0.0;  ///< max over x in B_U(xi,2r), z in F of g(x,z)/g(x,y*)
  VertexId x = 0;
  VertexId z = 0;
  VertexId y_star = 0;
  std::size_t annulus_size = 0;
  /// Curve check on the A3 r sphere, read at the scale r' = r A3 / A3p
  /// where A3p = max(2 + 2/c_U, 7).
  double curve_scale = 0.0;
  double curve_A3 = 0.0;
  std::size_t curves_certified = 0;
  std::size_t curves_skipped = 0;
  std::size_t curve_violations = 0;
  std::vector<CurveCheck> curves;
  bool curves_ok() const { return curve_violations == 0; }
};

/// `curve_pairs` pairs of sphere points are drawn with a seeded generator.
AnnulusReport annulus_bound_check(const BhpConfig& cfg, std::size_t curve_pairs = 100, std::uint64_t seed = 1);

}  // namespace harnack
