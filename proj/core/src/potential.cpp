#include "harnack/potential.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "harnack/errors.hpp"

namespace harnack {

GreenTable::GreenTable(const WeightedGraph& g, VertexSet omega, GreenTableOptions options)
    : solver_(std::make_shared<const DirichletSolver>(g, std::move(omega), options.solver)) {
  const auto n = static_cast<Eigen::Index>(solver_->size());
  if (solver_->size() <= options.dense_limit) {
    dense_.resize(n, n);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      e[j] = 1.0;
      dense_.col(j) = solver_->solve(e);
      e[j] = 0.0;
    }
  }
}

double GreenTable::operator()(VertexId x, VertexId y) const {
  const auto i = solver_->local(x);
  const auto j = solver_->local(y);
  if (i < 0 || j < 0) fail(ErrorKind::InvalidArgument, "Green kernel queried outside its domain");
  if (is_dense()) return dense_(i, j);
  return column(y)[i];
}

Eigen::VectorXd GreenTable::column(VertexId y) const {
  const auto j = solver_->local(y);
  if (j < 0) fail(ErrorKind::InvalidArgument, "Green kernel pole outside its domain");
  if (is_dense()) return dense_.col(j);
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(y); it != cache_.end()) return it->second;
  }
  Eigen::VectorXd col = solver_->green_column(y);
  std::lock_guard lock(cache_mutex_);
  return cache_.emplace(y, std::move(col)).first->second;
}

const Eigen::MatrixXd& GreenTable::matrix() const {
  if (!is_dense()) fail(ErrorKind::InvalidArgument, "Green table was not materialized");
  return dense_;
}

GreenTable green_table(const WeightedGraph& g, VertexSet omega, GreenTableOptions options) {
  return GreenTable(g, std::move(omega), options);
}

double lambda_min(const WeightedGraph& g, VertexSet omega, SolverOptions options) {
  const DirichletSolver solver(g, std::move(omega), options);
  const auto& dom = solver.omega();
  const auto n = static_cast<Eigen::Index>(dom.size());
  Eigen::VectorXd m(n);
  for (Eigen::Index i = 0; i < n; ++i) m[i] = g.measure(dom[i]);

  if (n <= 1500) {
    const Eigen::MatrixXd a = Eigen::MatrixXd(solver.matrix());
    const Eigen::MatrixXd mm = m.asDiagonal();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, mm, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) fail(ErrorKind::SolverDivergence, "generalized eigensolver failed");
    return es.eigenvalues()[0];
  }

  // inverse iteration on A^{-1} M; the start vector is positive so it has a
  // component along the (positive) ground state
  Eigen::VectorXd u = Eigen::VectorXd::Ones(n);
  double lambda = 0.0;
  for (int it = 0; it < 2000; ++it) {
    Eigen::VectorXd v = solver.solve(m.cwiseProduct(u));
    v /= std::sqrt(v.dot(m.cwiseProduct(v)));
    const double next = v.dot(solver.matrix() * v);
    u = std::move(v);
    if (it > 0 && std::abs(next - lambda) <= 1e-14 * next) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return lambda;
}

EquilibriumPotential capacity(const WeightedGraph& g, std::span<const VertexId> domain,
                              std::span<const VertexId> target, SolverOptions options) {
  const std::size_t n = g.vertex_count();
  const VertexSet d = make_set({domain.begin(), domain.end()});
  const VertexSet a = make_set({target.begin(), target.end()});
  if (d.size() >= n) fail(ErrorKind::NoBoundary, "capacity domain is the whole graph");
  const auto in_d = membership(n, d);
  for (VertexId x : a)
    if (!in_d[x]) fail(ErrorKind::InvalidArgument, "capacity target is not contained in the domain");

  EquilibriumPotential out;
  out.potential = VertexFunction::Zero(static_cast<Eigen::Index>(n));
  if (a.empty()) return out;

  const auto in_a = membership(n, a);
  for (VertexId x : a) out.potential[x] = 1.0;
  VertexSet rest;
  for (VertexId x : d)
    if (!in_a[x]) rest.push_back(x);
  if (!rest.empty()) {
    const DirichletSolver solver(g, rest, options);
    Eigen::VectorXd data(static_cast<Eigen::Index>(solver.boundary().size()));
    for (std::size_t j = 0; j < solver.boundary().size(); ++j) data[j] = in_a[solver.boundary()[j]] ? 1.0 : 0.0;
    const Eigen::VectorXd u = solver.extend(data);
    for (std::size_t i = 0; i < rest.size(); ++i) out.potential[rest[i]] = u[i];
  }
  out.capacity = dirichlet_energy(g, out.potential);
  for (VertexId x : a)
    for (const auto& nb : g.neighbors(x))
      if (!in_a[nb.v]) out.flux += nb.w * (1.0 - out.potential[nb.v]);
  return out;
}

std::int64_t KernelCone::row_of(VertexId x) const noexcept {
  auto it = std::lower_bound(rows.begin(), rows.end(), x);
  return (it != rows.end() && *it == x) ? it - rows.begin() : -1;
}

std::int64_t KernelCone::column_of(VertexId z) const noexcept {
  auto it = std::lower_bound(columns.begin(), columns.end(), z);
  return (it != columns.end() && *it == z) ? it - columns.begin() : -1;
}

double KernelCone::operator()(VertexId x, VertexId z) const {
  const auto i = row_of(x);
  const auto j = column_of(z);
  if (i < 0 || j < 0) fail(ErrorKind::InvalidArgument, "kernel entry outside the cone");
  return values(i, j);
}

double KernelCone::measure_of(VertexId x, std::span<const VertexId> boundary_part) const {
  const auto i = row_of(x);
  if (i < 0) fail(ErrorKind::InvalidArgument, "harmonic measure queried outside the domain");
  double s = 0.0;
  for (VertexId z : boundary_part)
    if (const auto j = column_of(z); j >= 0) s += values(i, j);
  return s;
}

KernelCone kernel_columns(const DirichletSolver& solver, std::span<const VertexId> columns,
                          std::span<const VertexId> rows) {
  KernelCone k;
  k.columns = make_set({columns.begin(), columns.end()});
  k.rows = rows.empty() ? solver.omega() : make_set({rows.begin(), rows.end()});
  std::vector<Eigen::Index> local;
  local.reserve(k.rows.size());
  for (VertexId x : k.rows) {
    const auto i = solver.local(x);
    if (i < 0) fail(ErrorKind::InvalidArgument, "kernel row outside the domain");
    local.push_back(i);
  }
  k.values.resize(static_cast<Eigen::Index>(k.rows.size()), static_cast<Eigen::Index>(k.columns.size()));
  for (std::size_t j = 0; j < k.columns.size(); ++j) {
    const Eigen::VectorXd col = solver.kernel_column(k.columns[j]);
    for (std::size_t i = 0; i < local.size(); ++i)
      k.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[local[i]];
  }
  return k;
}

KernelCone harmonic_measure_kernel(const WeightedGraph& g, VertexSet omega, SolverOptions options) {
  const DirichletSolver solver(g, std::move(omega), options);
  return kernel_columns(solver, solver.boundary());
}

VertexFunction solve_dirichlet(const WeightedGraph& g, VertexSet omega, const VertexFunction& data,
                               SolverOptions options) {
  if (data.size() != static_cast<Eigen::Index>(g.vertex_count()))
    fail(ErrorKind::InvalidArgument, "boundary data must be indexed like the graph");
  const DirichletSolver solver(g, std::move(omega), options);
  const auto& bd = solver.boundary();
  Eigen::VectorXd b(static_cast<Eigen::Index>(bd.size()));
  for (std::size_t j = 0; j < bd.size(); ++j) {
    if (!std::isfinite(data[bd[j]])) fail(ErrorKind::InvalidArgument, "boundary data is not finite");
    b[j] = data[bd[j]];
  }
  const Eigen::VectorXd u = solver.extend(b);
  VertexFunction out = VertexFunction::Zero(data.size());
  for (std::size_t j = 0; j < bd.size(); ++j) out[bd[j]] = b[j];
  for (std::size_t i = 0; i < solver.omega().size(); ++i) out[solver.omega()[i]] = u[i];
  return out;
}

MaximumPrincipleReport check_maximum_principles(const WeightedGraph& g, const GreenTable& gt, VertexId x0,
                                                std::span<const VertexId> w, double tol) {
  const auto& dom = gt.domain();
  const VertexSet ws = make_set({w.begin(), w.end()});
  const auto& solver = gt.solver();
  if (!std::binary_search(ws.begin(), ws.end(), x0)) fail(ErrorKind::BadNesting, "x0 is not in W");
  for (VertexId x : ws)
    if (solver.local(x) < 0) fail(ErrorKind::BadNesting, "W is not contained in the domain");
  const VertexSet dw = vertex_boundary(g, ws);
  for (VertexId x : dw)
    if (solver.local(x) < 0) fail(ErrorKind::BadNesting, "the boundary of W leaves the domain");
  if (dw.empty()) fail(ErrorKind::BadNesting, "W has no boundary inside the domain");

  const Eigen::VectorXd col = gt.column(x0);
  const double scale = col.maxCoeff();
  auto val = [&](VertexId v) { return col[solver.local(v)]; };

  MaximumPrincipleReport rep;
  rep.inf_boundary = kInfinity;
  rep.sup_boundary = -kInfinity;
  for (VertexId b : dw) {
    rep.inf_boundary = std::min(rep.inf_boundary, val(b));
    rep.sup_boundary = std::max(rep.sup_boundary, val(b));
  }

  rep.inf_inside = kInfinity;
  for (VertexId x : ws) {
    if (x == x0) continue;
    if (val(x) < rep.inf_inside) {
      rep.inf_inside = val(x);
      rep.inf_witness = x;
    }
  }
  rep.inf_clause_vacuous = ws.size() == 1;
  rep.inf_holds = rep.inf_clause_vacuous || rep.inf_inside >= rep.inf_boundary - tol * scale;

  const auto in_w = membership(g.vertex_count(), ws);
  rep.sup_outside = -kInfinity;
  for (VertexId x : dom) {
    if (in_w[x]) continue;
    if (val(x) > rep.sup_outside) {
      rep.sup_outside = val(x);
      rep.sup_witness = x;
    }
  }
  rep.sup_holds = rep.sup_outside <= rep.sup_boundary + tol * scale;
  return rep;
}

DominationReport check_green_domination(const WeightedGraph& g, const GreenTable& gt, VertexId y, VertexId y_star,
                                        double r, double c0, double tol) {
  const auto& solver = gt.solver();
  if (solver.local(y) < 0 || solver.local(y_star) < 0)
    fail(ErrorKind::BadNesting, "poles must lie in the domain");
  const VertexSet ball = open_ball(g, y_star, r);
  const VertexSet sphere = vertex_boundary(g, ball);
  for (VertexId x : ball)
    if (solver.local(x) < 0) fail(ErrorKind::BadNesting, "the ball is not contained in the domain");

  const Eigen::VectorXd gy = gt.column(y);
  const Eigen::VectorXd gs = gt.column(y_star);
  const double scale = std::max(gy.maxCoeff(), gs.maxCoeff());
  auto margin = [&](VertexId x) {
    const auto i = solver.local(x);
    return gy[i] - c0 * gs[i];
  };

  DominationReport rep;
  rep.worst_margin = kInfinity;
  for (VertexId x : sphere) {
    if (solver.local(x) < 0) continue;  // outside the domain both kernels vanish
    if (margin(x) < -tol * scale) {
      rep.status = DominationStatus::HypothesisFailed;
      rep.worst_margin = margin(x);
      rep.witness = x;
      return rep;
    }
  }
  const auto in_ball = membership(g.vertex_count(), ball);
  for (VertexId x : gt.domain()) {
    if (x == y || in_ball[x]) continue;
    if (margin(x) < rep.worst_margin) {
      rep.worst_margin = margin(x);
      rep.witness = x;
    }
  }
  if (rep.worst_margin < -tol * scale) rep.status = DominationStatus::Violated;
  return rep;
}

double semigroup_green_consistency(const WeightedGraph& g, VertexSet omega, double horizon, int steps) {
  const DirichletSolver solver(g, std::move(omega));
  const auto n = static_cast<Eigen::Index>(solver.size());
  if (n > 12) fail(ErrorKind::InvalidArgument, "semigroup check is limited to 12 vertices");
  if (horizon < 0.0 || steps < 2 || steps % 2 != 0)
    fail(ErrorKind::InvalidArgument, "semigroup check needs T >= 0 and an even number of steps");

  const Eigen::MatrixXd a = Eigen::MatrixXd(solver.matrix());
  Eigen::VectorXd m(n);
  for (Eigen::Index i = 0; i < n; ++i) m[i] = g.measure(solver.omega()[i]);
  const Eigen::MatrixXd green_op = a.ldlt().solve(Eigen::MatrixXd(m.asDiagonal()));
  if (horizon == 0.0) return green_op.cwiseAbs().maxCoeff();

  const Eigen::MatrixXd gen = m.cwiseInverse().asDiagonal() * a;
  const double h = horizon / steps;
  const Eigen::MatrixXd step = (-h * gen).exp();
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd integral = p;
  for (int i = 1; i <= steps; ++i) {
    p = p * step;
    const double wgt = (i == steps) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    integral += wgt * p;
  }
  integral *= h / 3.0;
  return (green_op - integral).cwiseAbs().maxCoeff();
}

}  // namespace harnack
