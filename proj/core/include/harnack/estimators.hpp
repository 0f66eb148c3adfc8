#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "harnack/domain.hpp"
#include "harnack/graph.hpp"
#include "harnack/potential.hpp"
#include "harnack/stats.hpp"

namespace harnack {

// --- extremal rays ---------------------------------------------------------
//
// For a matrix K >= 0 whose columns span a cone {K c : c >= 0}, a ratio of two
// cone members at two rows is a linear-fractional function of the
// coefficients, so its supremum over the cone is attained at single columns.

/// Columns with an entry below this are treated as vanishing and skipped.
inline constexpr double kZeroKernel = 1e-300;

struct ColumnSpread {
  double value = 1.0;  ///< max_j max_i K(i,j) / min_i K(i,j)
  std::size_t column = 0;
  std::size_t row_max = 0;
  std::size_t row_min = 0;
  std::size_t skipped_columns = 0;
};

ColumnSpread max_column_spread(const Eigen::MatrixXd& k);

struct CrossRatio {
  /// max over rows a, b of [max_j K(a,j)/K(b,j)] [max_j K(b,j)/K(a,j)]
  double value = 1.0;
  std::size_t row_a = 0;
  std::size_t row_b = 0;
  std::size_t column_ab = 0;  ///< argmax of K(a,j)/K(b,j)
  std::size_t column_ba = 0;  ///< argmax of K(b,j)/K(a,j)
  std::size_t skipped_columns = 0;
};

CrossRatio max_cross_ratio(const Eigen::MatrixXd& k);

/// Largest (max u / min u) over the rows, for `samples` random members
/// u = K c with c >= 0 drawn from a seeded generator.
double sampled_spread(const Eigen::MatrixXd& k, int samples, std::uint64_t seed);

/// Largest (u(a) v(b)) / (u(b) v(a)) over rows for random cone pairs (u, v).
double sampled_cross_ratio(const Eigen::MatrixXd& k, int samples, std::uint64_t seed);

// --- EHI -------------------------------------------------------------------

struct EhiEntry {
  VertexId center = 0;
  double R = 0.0;
  double delta = 0.0;
  double C_H = 1.0;
  VertexId x_max = 0;  ///< witness: u = K(., z) is largest here on the half ball
  VertexId x_min = 0;
  VertexId z = 0;
  std::size_t skipped_columns = 0;
  /// Kernel rows of the closed half ball {d <= delta R}, all boundary columns.
  KernelCone half_ball;
};

/// C_H for Omega = B(center, R) = {d < R}: largest column spread of the
/// harmonic-measure kernel over the closed half ball {d <= delta R}.
EhiEntry ehi_constant(const WeightedGraph& g, VertexId center, double R, double delta, SolverOptions options = {});

struct EhiScanResult {
  std::vector<EhiEntry> entries;  ///< sorted by (center, R)
  double sup = 1.0;
  /// max over centers and radius pairs (R, 2R) both scanned of the larger
  /// C_H over the smaller; 1 when no such pair exists
  double scale_stability = 1.0;
};

EhiScanResult ehi_scan(const WeightedGraph& g, std::span<const VertexId> centers, std::span<const double> radii,
                       double delta, SolverOptions options = {});

// --- capacitary width --------------------------------------------------------

struct CapacitaryWidthOptions {
  /// V larger than this is thinned to an evenly strided subsample (sorted ids).
  std::size_t max_points = 64;
  SolverOptions solver{};
};

struct CapacitaryWidthResult {
  VertexSet V;  ///< points actually tested
  double eta = 0.0;
  double w = kInfinity;  ///< +inf when no grid radius works
  std::size_t grid_index = 0;
  double worst_ratio = 1.0;  ///< min over tested x of the ratio at r = w
  VertexId worst_point = 0;
  std::size_t subsampled_from = 0;
};

/// Cap_{B(x,2r)}(closed B(x,r) minus V) / Cap_{B(x,2r)}(closed B(x,r)).
double capacity_ratio(const WeightedGraph& g, std::span<const char> in_v, VertexId x, double r,
                      SolverOptions options = {});

/// Smallest grid r at which the ratio is >= eta for every x in V.
CapacitaryWidthResult capacitary_width(const WeightedGraph& g, std::span<const VertexId> V, double eta,
                                       std::span<const double> r_grid, const CapacitaryWidthOptions& options = {});

/// Geometric grid lo, lo q, lo q^2, ... up to hi with q = 2^(1/4).
std::vector<double> geometric_grid(double lo, double hi);

struct CwBoundEntry {
  double r = 0.0;
  double w = kInfinity;
  double ratio = kInfinity;  ///< w / r
  std::size_t points = 0;
};

struct CwBoundResult {
  std::vector<CwBoundEntry> entries;
  double A1 = kInfinity;  ///< max ratio
  double spread = kInfinity;  ///< max ratio / min ratio
  bool bounded = false;
};

/// Measures A1 = max_r w_eta({x in U : delta_U(x) < r}) / r. Capacities use
/// the ambient graph; V_r is restricted to the window B_U(xi, window * r).
CwBoundResult cw_linear_bound_check(const DomainView& dv, VertexId xi, double eta, std::span<const double> r_list,
                                    double window = 2.0, const CapacitaryWidthOptions& options = {});

/// Half of the smallest capacity ratio seen for V_r near xi at radius rho.
double calibrate_eta(const DomainView& dv, VertexId xi, double r, double rho, double window = 2.0,
                     const CapacitaryWidthOptions& options = {});

// --- harmonic measure ------------------------------------------------------

struct HmDecayResult {
  std::vector<double> r;
  std::vector<double> omega;
  LinearFit fit;      ///< log omega against r / width
  double width = 0.0;  ///< capacitary width used for the abscissa
  bool flat = false;   ///< |slope| below 1e-6: no decay visible
  bool monotone = true;  ///< omega nonincreasing in r (to 1e-10)
};

/// omega(x, V cap dB(x,r), V cap B(x,r)) for each r, and its fit.
HmDecayResult hm_decay_check(const WeightedGraph& g, std::span<const VertexId> V, VertexId x,
                             std::span<const double> r_list, double width, SolverOptions options = {});

struct HmGreenBoundResult {
  double C4 = 0.0;
  VertexId xi_r = 0;
  VertexId xi_r_prime = 0;
  VertexId witness = 0;
  double A2 = 0.0;
  std::size_t points = 0;
};

/// Largest ratio of omega(x, U cap dB_U(xi,2r), B_U(xi,2r)) to
/// g'(x) / g'(xi'_r) over x in B_U(xi, r), where g' = g_{B_U(xi, A2 r)}(., xi_r).
HmGreenBoundResult hm_green_bound(const DomainView& dv, VertexId xi, double r, double A2, double c_U,
                                  SolverOptions options = {});

// --- Green comparisons -----------------------------------------------------

struct GreenComparisonConfig {
  VertexId x0 = 0;
  double r = 1.0;
  double A1 = 2.0;
  double A2 = 4.0;
  double a = 0.5;
  std::size_t max_points = 48;  ///< subsample of B(x0,r) used for the pairwise constant
};

struct GreenComparisonResult {
  double C0 = 1.0;  ///< pairwise Green comparability on B(x0,r) inside D = B(x0, A1 r)
  double C1 = 1.0;  ///< Cap_D(B)^{-1} / inf over the sphere of g_D(x0, .)
  double C2 = 1.0;  ///< capacity comparability across radii
  double C3 = 1.0;  ///< g_{B(x,A2 r)} / g_{B(x,A1 r)} on the sphere d(x,y) = r
  double inf_sphere_green = 0.0;
  double cap_closed = 0.0;
  double cap_open = 0.0;
  double cap_small = 0.0;  ///< Cap_{B(x0,A2 r)}(B(x0, a r))
  double cap_mid = 0.0;    ///< Cap_{B(x0,A1 r)}(B(x0, r))
  bool b_lower = false;    ///< inf g <= Cap(closed B)^{-1}
  bool b_middle = false;   ///< Cap(closed B)^{-1} <= Cap(B)^{-1}
  bool c_lower = false;
  bool d_lower = false;
  bool constant_free_ok() const { return b_lower && b_middle && c_lower && d_lower; }
};

GreenComparisonResult green_comparison_suite(const WeightedGraph& g, const GreenComparisonConfig& cfg,
                                             SolverOptions options = {});

// --- Harnack chains ----------------------------------------------------------

struct ChainConsequence {
  bool holds = false;
  std::size_t N = 0;
  double C_H = 1.0;  ///< max of the per-ball constants along the chain
  double ratio = 1.0;  ///< u(x2) / u(x1)
  double harmonic_residual = 0.0;
  HarnackChain chain;
};

/// Checks C_H^{-N} u(x1) <= u(x2) <= C_H^{N} u(x1) with N from the chain and
/// C_H from EHI constants of the chain's own balls (delta = 1/M).
ChainConsequence harnack_chain_consequence_check(const DomainView& dv, const VertexFunction& u, VertexId x1,
                                                 VertexId x2, double M, std::span<const double> radius_grid,
                                                 SolverOptions options = {});

}  // namespace harnack
