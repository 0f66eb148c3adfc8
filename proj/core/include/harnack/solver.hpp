#pragma once

#include <cstdint>
#include <memory>

#include <Eigen/SparseCore>

#include "harnack/graph.hpp"

namespace harnack {

enum class SolverMethod { Cholesky, ConjugateGradient };

/// Relative backward-error tolerance; HARNACK_LAB_SOLVER_TOL overrides 1e-11.
double default_solver_tolerance();

struct SolverOptions {
  SolverMethod method = SolverMethod::Cholesky;
  double tolerance = default_solver_tolerance();
  int max_iterations = 0;  ///< CG only; 0 means 20 * |Omega|
};

/// Dirichlet problem on a vertex set Omega of a graph: A is the |Omega|x|Omega|
/// conductance Laplacian with A_xx = w_x (all neighbours, inside or not) and
/// A_xy = -w_xy for y in Omega. The factorization is built once and shared by
/// copies; solves are safe to run concurrently.
class DirichletSolver {
 public:
  DirichletSolver(const WeightedGraph& g, VertexSet omega, SolverOptions options = {});

  const VertexSet& omega() const noexcept { return omega_; }
  /// Vertices outside Omega adjacent to it, sorted.
  const VertexSet& boundary() const noexcept { return boundary_; }
  std::size_t size() const noexcept { return omega_.size(); }

  /// Position of v in omega(), or -1.
  std::int64_t local(VertexId v) const noexcept { return v < local_.size() ? local_[v] : -1; }
  /// Position of v in boundary(), or -1.
  std::int64_t boundary_local(VertexId v) const noexcept {
    return v < boundary_local_.size() ? boundary_local_[v] : -1;
  }

  const Eigen::SparseMatrix<double>& matrix() const noexcept { return a_; }
  /// |Omega| x |boundary| coupling weights w_xz.
  const Eigen::SparseMatrix<double>& coupling() const noexcept { return coupling_; }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  /// g_Omega(., y) on Omega, i.e. A^{-1} e_y.
  Eigen::VectorXd green_column(VertexId y) const;
  /// Harmonic extension of the indicator of boundary vertex z.
  Eigen::VectorXd kernel_column(VertexId z) const;
  /// Harmonic extension of values given on boundary() (same order).
  Eigen::VectorXd extend(const Eigen::VectorXd& boundary_values) const;

  double max_residual() const noexcept;
  std::size_t solve_count() const noexcept;
  const SolverOptions& options() const noexcept { return options_; }

 private:
  struct Factor;
  VertexSet omega_;
  VertexSet boundary_;
  std::vector<std::int32_t> local_;
  std::vector<std::int32_t> boundary_local_;
  Eigen::SparseMatrix<double> a_;
  Eigen::SparseMatrix<double> coupling_;
  double a_norm_ = 0.0;
  SolverOptions options_;
  std::shared_ptr<Factor> factor_;
};

}  // namespace harnack
