#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <unordered_map>

#include <Eigen/Core>

#include "harnack/graph.hpp"
#include "harnack/solver.hpp"

namespace harnack {

struct GreenTableOptions {
  /// Tables up to this size are materialized; larger ones solve columns on demand.
  std::size_t dense_limit = 4000;
  SolverOptions solver{};
};

/// Dirichlet Green kernel g_Omega = A^{-1} (conductance convention, so the
/// kernel does not depend on the vertex measure). The operator G^Omega acting
/// on functions is A^{-1} M.
class GreenTable {
 public:
  GreenTable(const WeightedGraph& g, VertexSet omega, GreenTableOptions options = {});

  const VertexSet& domain() const noexcept { return solver_->omega(); }
  const DirichletSolver& solver() const noexcept { return *solver_; }
  std::shared_ptr<const DirichletSolver> shared_solver() const noexcept { return solver_; }
  bool is_dense() const noexcept { return dense_.size() > 0; }

  /// g(x, y); both vertices must lie in the domain.
  double operator()(VertexId x, VertexId y) const;
  /// g(., y) in domain order.
  Eigen::VectorXd column(VertexId y) const;
  /// Dense table (throws when the table is column-on-demand).
  const Eigen::MatrixXd& matrix() const;

 private:
  std::shared_ptr<const DirichletSolver> solver_;
  Eigen::MatrixXd dense_;
  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<VertexId, Eigen::VectorXd> cache_;
};

GreenTable green_table(const WeightedGraph& g, VertexSet omega, GreenTableOptions options = {});

/// Smallest eigenvalue of A u = lambda M u on Omega.
double lambda_min(const WeightedGraph& g, VertexSet omega, SolverOptions options = {});

struct EquilibriumPotential {
  VertexFunction potential;  ///< 1 on A, 0 off D, harmonic on D \ A
  double capacity = 0.0;     ///< energy of the potential
  double flux = 0.0;         ///< sum_{x in A} sum_{y not in A} w_xy (1 - f(y))
};

/// Cap_D(A). An empty A gives capacity 0 with the zero potential.
EquilibriumPotential capacity(const WeightedGraph& g, std::span<const VertexId> domain,
                              std::span<const VertexId> target, SolverOptions options = {});

/// Matrix K(x, z) of harmonic-measure kernels: column z is the harmonic
/// function on the domain with boundary data 1_{z}.
struct KernelCone {
  VertexSet rows;     ///< vertices x (subset of the domain)
  VertexSet columns;  ///< boundary vertices z
  Eigen::MatrixXd values;

  std::int64_t row_of(VertexId x) const noexcept;
  std::int64_t column_of(VertexId z) const noexcept;
  double operator()(VertexId x, VertexId z) const;
  /// omega(x, F) = sum over z in F of K(x, z).
  double measure_of(VertexId x, std::span<const VertexId> boundary_part) const;
};

KernelCone harmonic_measure_kernel(const WeightedGraph& g, VertexSet omega, SolverOptions options = {});

/// Kernel columns for a chosen subset of boundary vertices, keeping only the
/// requested rows (all of the domain when `rows` is empty).
KernelCone kernel_columns(const DirichletSolver& solver, std::span<const VertexId> columns,
                          std::span<const VertexId> rows = {});

/// Harmonic extension of `data` (read on the boundary of Omega). The result
/// carries the boundary data on boundary vertices and zero elsewhere.
VertexFunction solve_dirichlet(const WeightedGraph& g, VertexSet omega, const VertexFunction& data,
                               SolverOptions options = {});

struct MaximumPrincipleReport {
  bool inf_clause_vacuous = false;
  bool inf_holds = false;
  bool sup_holds = false;
  double inf_inside = 0.0;  ///< inf of g(x0, .) over W \ {x0}
  double inf_boundary = 0.0;
  double sup_outside = 0.0;  ///< sup over Omega \ W
  double sup_boundary = 0.0;
  VertexId inf_witness = 0;
  VertexId sup_witness = 0;
};

/// Discrete form of the two Green maximum principles for x0 in W with the
/// vertex boundary dW of W inside Omega: the infimum of g(x0, .) over the
/// closure of W minus x0 is attained on dW, and its supremum over Omega \ W is
/// attained on dW.
MaximumPrincipleReport check_maximum_principles(const WeightedGraph& g, const GreenTable& gt, VertexId x0,
                                                std::span<const VertexId> w, double tol = 1e-10);

enum class DominationStatus { Holds, Violated, HypothesisFailed };

struct DominationReport {
  DominationStatus status = DominationStatus::Holds;
  double worst_margin = 0.0;  ///< min of g(y,x) - c0 g(y*,x) over the checked set
  VertexId witness = 0;
};

/// Propagates g(y, .) >= c0 g(y*, .) from the outer vertex boundary of
/// B(y*, r) to Omega \ ({y} u B(y*, r)).
DominationReport check_green_domination(const WeightedGraph& g, const GreenTable& gt, VertexId y, VertexId y_star,
                                        double r, double c0, double tol = 1e-12);

/// max-norm distance between A^{-1}M and the quadrature of exp(-t M^{-1}A)
/// over [0, T] (composite Simpson, `steps` even). Dense; |Omega| <= 12.
double semigroup_green_consistency(const WeightedGraph& g, VertexSet omega, double horizon, int steps);

}  // namespace harnack
