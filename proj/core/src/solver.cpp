#include "harnack/solver.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "harnack/errors.hpp"

namespace harnack {

double default_solver_tolerance() {
  if (const char* env = std::getenv("HARNACK_LAB_SOLVER_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && std::isfinite(v) && v > 0.0) return v;
  }
  return 1e-11;
}

struct DirichletSolver::Factor {
  std::optional<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> ldlt;
  std::optional<Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                                         Eigen::DiagonalPreconditioner<double>>>
      cg;
  std::atomic<double> max_residual{0.0};
  std::atomic<std::size_t> solves{0};
};

DirichletSolver::DirichletSolver(const WeightedGraph& g, VertexSet omega, SolverOptions options)
    : omega_(make_set(std::move(omega))), options_(options), factor_(std::make_shared<Factor>()) {
  const std::size_t n = g.vertex_count();
  if (omega_.empty()) fail(ErrorKind::InvalidArgument, "Dirichlet domain is empty");
  if (omega_.back() >= n) fail(ErrorKind::InvalidArgument, "Dirichlet domain vertex out of range");
  local_.assign(n, -1);
  for (std::size_t i = 0; i < omega_.size(); ++i) local_[omega_[i]] = static_cast<std::int32_t>(i);

  boundary_ = vertex_boundary(g, omega_);
  if (boundary_.empty()) fail(ErrorKind::NoBoundary, "domain has no boundary vertices; the system is singular");
  boundary_local_.assign(n, -1);
  for (std::size_t i = 0; i < boundary_.size(); ++i) boundary_local_[boundary_[i]] = static_cast<std::int32_t>(i);

  // every component of Omega must touch the complement
  for (const auto& comp : components(g, omega_)) {
    bool touches = false;
    for (VertexId x : comp) {
      for (const auto& nb : g.neighbors(x))
        if (local_[nb.v] < 0) {
          touches = true;
          break;
        }
      if (touches) break;
    }
    if (!touches) fail(ErrorKind::NoBoundary, "a component of the domain touches no boundary vertex");
  }

  const auto m = static_cast<Eigen::Index>(omega_.size());
  std::vector<Eigen::Triplet<double>> ta, tb;
  for (std::size_t i = 0; i < omega_.size(); ++i) {
    const VertexId x = omega_[i];
    const auto ii = static_cast<Eigen::Index>(i);
    ta.emplace_back(ii, ii, g.weight(x));
    double row = g.weight(x);
    for (const auto& nb : g.neighbors(x)) {
      row += nb.w;
      if (local_[nb.v] >= 0)
        ta.emplace_back(ii, local_[nb.v], -nb.w);
      else
        tb.emplace_back(ii, boundary_local_[nb.v], nb.w);
    }
    a_norm_ = std::max(a_norm_, row);
  }
  a_.resize(m, m);
  a_.setFromTriplets(ta.begin(), ta.end());
  coupling_.resize(m, static_cast<Eigen::Index>(boundary_.size()));
  coupling_.setFromTriplets(tb.begin(), tb.end());

  if (options_.method == SolverMethod::Cholesky) {
    factor_->ldlt.emplace();
    factor_->ldlt->compute(a_);
    if (factor_->ldlt->info() != Eigen::Success)
      fail(ErrorKind::SolverDivergence, "sparse Cholesky factorization failed");
  } else {
    factor_->cg.emplace();
    factor_->cg->setTolerance(options_.tolerance);
    factor_->cg->setMaxIterations(options_.max_iterations > 0 ? options_.max_iterations
                                                              : static_cast<int>(20 * omega_.size()));
    factor_->cg->compute(a_);
  }
}

Eigen::VectorXd DirichletSolver::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != a_.rows()) fail(ErrorKind::InvalidArgument, "right-hand side has the wrong length");
  auto once = [&](const Eigen::VectorXd& b) -> Eigen::VectorXd {
    if (factor_->ldlt) return factor_->ldlt->solve(b);
    Eigen::VectorXd u = factor_->cg->solve(b);
    if (factor_->cg->info() != Eigen::Success)
      fail(ErrorKind::SolverDivergence,
           "conjugate gradient did not converge in " + std::to_string(factor_->cg->maxIterations()) + " iterations");
    return u;
  };
  const double b_norm = rhs.lpNorm<Eigen::Infinity>();
  Eigen::VectorXd u = once(rhs);
  auto backward_error = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    r = rhs - a_ * x;
    const double scale = a_norm_ * x.lpNorm<Eigen::Infinity>() + b_norm;
    return scale > 0.0 ? r.lpNorm<Eigen::Infinity>() / scale : 0.0;
  };
  Eigen::VectorXd r;
  double err = backward_error(u, r);
  for (int refine = 0; refine < 3 && err > options_.tolerance; ++refine) {
    u += once(r);
    err = backward_error(u, r);
  }
  if (!(err <= options_.tolerance))
    fail(ErrorKind::SolverDivergence, "relative residual " + std::to_string(err) + " above tolerance");
  double prev = factor_->max_residual.load();
  while (err > prev && !factor_->max_residual.compare_exchange_weak(prev, err)) {
  }
  factor_->solves.fetch_add(1);
  return u;
}

Eigen::VectorXd DirichletSolver::green_column(VertexId y) const {
  const auto i = local(y);
  if (i < 0) fail(ErrorKind::InvalidArgument, "pole is not in the domain");
  Eigen::VectorXd e = Eigen::VectorXd::Zero(a_.rows());
  e[i] = 1.0;
  return solve(e);
}

Eigen::VectorXd DirichletSolver::kernel_column(VertexId z) const {
  const auto j = boundary_local(z);
  if (j < 0) fail(ErrorKind::InvalidArgument, "vertex is not on the domain boundary");
  Eigen::VectorXd b = coupling_.col(j);
  return solve(b);
}

Eigen::VectorXd DirichletSolver::extend(const Eigen::VectorXd& boundary_values) const {
  if (boundary_values.size() != coupling_.cols())
    fail(ErrorKind::InvalidArgument, "boundary data has the wrong length");
  Eigen::VectorXd b = coupling_ * boundary_values;
  return solve(b);
}

double DirichletSolver::max_residual() const noexcept { return factor_->max_residual.load(); }
std::size_t DirichletSolver::solve_count() const noexcept { return factor_->solves.load(); }

}  // namespace harnack
