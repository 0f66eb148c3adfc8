#include "harnack/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "harnack/errors.hpp"

namespace harnack {

namespace {

constexpr double kEps = 1e-9;

std::vector<char> usable_columns(const Eigen::MatrixXd& k, std::size_t& skipped) {
  std::vector<char> ok(static_cast<std::size_t>(k.cols()), 1);
  skipped = 0;
  for (Eigen::Index j = 0; j < k.cols(); ++j)
    if (k.rows() == 0 || k.col(j).minCoeff() <= kZeroKernel) {
      ok[j] = 0;
      ++skipped;
    }
  return ok;
}

Eigen::VectorXd random_coefficients(Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  // high powers of uniforms give coefficient vectors dominated by a few rays
  const double p = 1.0 + 15.0 * unif(rng);
  Eigen::VectorXd c(n);
  for (Eigen::Index j = 0; j < n; ++j) c[j] = std::pow(unif(rng), p);
  if (c.maxCoeff() <= 0.0) c.setOnes();
  return c;
}

VertexSet strided(std::span<const VertexId> v, std::size_t max_points) {
  VertexSet all = make_set({v.begin(), v.end()});
  if (all.size() <= max_points || max_points == 0) return all;
  VertexSet out;
  const double step = static_cast<double>(all.size()) / static_cast<double>(max_points);
  for (std::size_t i = 0; i < max_points; ++i) out.push_back(all[static_cast<std::size_t>(i * step)]);
  return make_set(std::move(out));
}

}  // namespace

// --- extremal rays -----------------------------------------------------------

ColumnSpread max_column_spread(const Eigen::MatrixXd& k) {
  ColumnSpread out;
  const auto ok = usable_columns(k, out.skipped_columns);
  for (Eigen::Index j = 0; j < k.cols(); ++j) {
    if (!ok[j]) continue;
    Eigen::Index imax = 0, imin = 0;
    const double hi = k.col(j).maxCoeff(&imax);
    const double lo = k.col(j).minCoeff(&imin);
    if (hi / lo > out.value) {
      out.value = hi / lo;
      out.column = static_cast<std::size_t>(j);
      out.row_max = static_cast<std::size_t>(imax);
      out.row_min = static_cast<std::size_t>(imin);
    }
  }
  return out;
}

CrossRatio max_cross_ratio(const Eigen::MatrixXd& k) {
  CrossRatio out;
  const auto ok = usable_columns(k, out.skipped_columns);
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < k.cols(); ++j)
    if (ok[j]) cols.push_back(j);
  if (cols.empty()) return out;
  const Eigen::Index m = k.rows();
  const auto n = static_cast<Eigen::Index>(cols.size());
  Eigen::MatrixXd lg(m, n);
  for (Eigen::Index j = 0; j < n; ++j) lg.col(j) = k.col(cols[j]).array().log();

  double best = 0.0;
  Eigen::MatrixXd diff;
  for (Eigen::Index a = 0; a + 1 < m; ++a) {
    // diff(b, j) = log K(b,j) - log K(a,j) for b > a
    const Eigen::Index rest = m - a - 1;
    diff = lg.bottomRows(rest).rowwise() - lg.row(a);
    const Eigen::VectorXd spread = diff.rowwise().maxCoeff() - diff.rowwise().minCoeff();
    Eigen::Index i = 0;
    const double v = spread.maxCoeff(&i);
    if (v > best) {
      best = v;
      out.row_a = static_cast<std::size_t>(a);
      out.row_b = static_cast<std::size_t>(a + 1 + i);
    }
  }
  if (best > 0.0) {
    const Eigen::RowVectorXd d = lg.row(static_cast<Eigen::Index>(out.row_a)) -
                                 lg.row(static_cast<Eigen::Index>(out.row_b));
    Eigen::Index jab = 0, jba = 0;
    d.maxCoeff(&jab);
    d.minCoeff(&jba);
    out.column_ab = static_cast<std::size_t>(cols[jab]);
    out.column_ba = static_cast<std::size_t>(cols[jba]);
    const auto a = static_cast<Eigen::Index>(out.row_a), b = static_cast<Eigen::Index>(out.row_b);
    const auto z = static_cast<Eigen::Index>(out.column_ab), zp = static_cast<Eigen::Index>(out.column_ba);
    out.value = (k(a, z) / k(b, z)) * (k(b, zp) / k(a, zp));
  }
  return out;
}

double sampled_spread(const Eigen::MatrixXd& k, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 1.0;
  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd u = k * random_coefficients(k.cols(), rng);
    worst = std::max(worst, u.maxCoeff() / u.minCoeff());
  }
  return worst;
}

double sampled_cross_ratio(const Eigen::MatrixXd& k, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 1.0;
  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd u = k * random_coefficients(k.cols(), rng);
    const Eigen::VectorXd v = k * random_coefficients(k.cols(), rng);
    const Eigen::VectorXd q = u.cwiseQuotient(v);
    worst = std::max(worst, q.maxCoeff() / q.minCoeff());
  }
  return worst;
}

// --- EHI -----------------------------------------------------------------------

EhiEntry ehi_constant(const WeightedGraph& g, VertexId center, double R, double delta, SolverOptions options) {
  if (!(delta > 0.0 && delta < 1.0)) fail(ErrorKind::InvalidArgument, "delta must lie in (0,1)");
  if (!(R > 0.0)) fail(ErrorKind::InvalidArgument, "radius must be positive");
  if (delta * R < g.min_edge_length() - kEps) fail(ErrorKind::EmptyHalfBall, "delta R is below the mesh");
  const VertexId src[] = {center};
  const auto dist = shortest_distances(g, src, {}, R);
  VertexSet ball, half;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (dist[v] < R - kEps) ball.push_back(v);
    if (dist[v] <= delta * R + kEps) half.push_back(v);
  }
  const DirichletSolver solver(g, ball, options);
  const auto& bd = solver.boundary();

  EhiEntry e;
  e.center = center;
  e.R = R;
  e.delta = delta;
  if (half.size() < bd.size()) {
    // rows of K from Green columns: K(x, .) = g(x, .)^T W
    e.half_ball.rows = half;
    e.half_ball.columns = bd;
    e.half_ball.values.resize(static_cast<Eigen::Index>(half.size()), static_cast<Eigen::Index>(bd.size()));
    for (std::size_t i = 0; i < half.size(); ++i) {
      const Eigen::VectorXd gx = solver.green_column(half[i]);
      e.half_ball.values.row(static_cast<Eigen::Index>(i)) = (solver.coupling().transpose() * gx).transpose();
    }
  } else {
    e.half_ball = kernel_columns(solver, bd, half);
  }
  const ColumnSpread s = max_column_spread(e.half_ball.values);
  e.C_H = s.value;
  e.skipped_columns = s.skipped_columns;
  e.x_max = e.half_ball.rows[s.row_max];
  e.x_min = e.half_ball.rows[s.row_min];
  e.z = e.half_ball.columns[s.column];
  return e;
}

EhiScanResult ehi_scan(const WeightedGraph& g, std::span<const VertexId> centers, std::span<const double> radii,
                       double delta, SolverOptions options) {
  EhiScanResult out;
  std::vector<VertexId> cs(centers.begin(), centers.end());
  std::vector<double> rs(radii.begin(), radii.end());
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
  std::sort(rs.begin(), rs.end());
  rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
  for (VertexId c : cs)
    for (double R : rs) out.entries.push_back(ehi_constant(g, c, R, delta, options));
  std::map<std::pair<VertexId, double>, double> by_key;
  for (const auto& e : out.entries) {
    out.sup = std::max(out.sup, e.C_H);
    by_key[{e.center, e.R}] = e.C_H;
  }
  for (const auto& e : out.entries) {
    auto it = by_key.find({e.center, 2.0 * e.R});
    if (it == by_key.end()) continue;
    const double hi = std::max(e.C_H, it->second), lo = std::min(e.C_H, it->second);
    out.scale_stability = std::max(out.scale_stability, hi / lo);
  }
  return out;
}

// --- capacitary width ----------------------------------------------------------

double capacity_ratio(const WeightedGraph& g, std::span<const char> in_v, VertexId x, double r,
                      SolverOptions options) {
  const VertexId src[] = {x};
  const auto dist = shortest_distances(g, src, {}, 2.0 * r);
  VertexSet d, closed, rest;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (dist[v] < 2.0 * r - kEps) d.push_back(v);
    if (dist[v] <= r + kEps) {
      closed.push_back(v);
      if (!in_v[v]) rest.push_back(v);
    }
  }
  const double den = capacity(g, d, closed, options).capacity;
  if (rest.empty()) return 0.0;
  const double num = capacity(g, d, rest, options).capacity;
  return num / den;
}

std::vector<double> geometric_grid(double lo, double hi) {
  if (!(lo > 0.0) || !(hi >= lo)) fail(ErrorKind::InvalidArgument, "grid needs 0 < lo <= hi");
  std::vector<double> out;
  const double q = std::pow(2.0, 0.25);
  for (int k = 0;; ++k) {
    const double r = lo * std::pow(q, k);
    if (r > hi * (1.0 + 1e-12)) break;
    out.push_back(r);
  }
  return out;
}

CapacitaryWidthResult capacitary_width(const WeightedGraph& g, std::span<const VertexId> V, double eta,
                                       std::span<const double> r_grid, const CapacitaryWidthOptions& options) {
  if (!(eta > 0.0 && eta < 1.0)) fail(ErrorKind::InvalidArgument, "eta must lie in (0,1)");
  if (r_grid.empty()) fail(ErrorKind::InvalidArgument, "radius grid is empty");
  for (std::size_t i = 1; i < r_grid.size(); ++i)
    if (!(r_grid[i] > r_grid[i - 1])) fail(ErrorKind::InvalidArgument, "radius grid must increase");

  CapacitaryWidthResult out;
  out.eta = eta;
  out.subsampled_from = V.size();
  out.V = strided(V, options.max_points);
  if (out.V.empty()) {
    out.w = r_grid.front();
    return out;
  }
  const auto in_v = membership(g.vertex_count(), V);
  std::vector<std::size_t> order(out.V.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (std::size_t k = 0; k < r_grid.size(); ++k) {
    bool all = true;
    double worst = kInfinity;
    VertexId worst_point = 0;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      const VertexId x = out.V[order[pos]];
      const double ratio = capacity_ratio(g, in_v, x, r_grid[k], options.solver);
      if (ratio < worst) {
        worst = ratio;
        worst_point = x;
      }
      if (ratio < eta) {
        // the failing point is tried first at the next radius
        std::rotate(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(pos),
                    order.begin() + static_cast<std::ptrdiff_t>(pos) + 1);
        all = false;
        break;
      }
    }
    if (all) {
      out.w = r_grid[k];
      out.grid_index = k;
      out.worst_ratio = worst;
      out.worst_point = worst_point;
      return out;
    }
  }
  return out;
}

namespace {

VertexSet thin_set_near(const DomainView& dv, VertexId xi, double r, double window) {
  const auto d = dv.distances_from(xi);
  const auto delta = dv.delta();
  VertexSet v;
  for (VertexId x : dv.interior())
    if (delta[x] < r - kEps && (*d)[x] < window * r - kEps) v.push_back(dv.has_ambient() ? dv.project(x) : x);
  return make_set(std::move(v));
}

const WeightedGraph& capacity_space(const DomainView& dv) { return dv.has_ambient() ? dv.ambient() : dv.graph(); }

}  // namespace

CwBoundResult cw_linear_bound_check(const DomainView& dv, VertexId xi, double eta, std::span<const double> r_list,
                                    double window, const CapacitaryWidthOptions& options) {
  CwBoundResult out;
  const auto& space = capacity_space(dv);
  double lo = kInfinity, hi = 0.0;
  for (double r : r_list) {
    if (r < dv.mesh() - kEps) fail(ErrorKind::InvalidArgument, "radius below the mesh");
    const VertexSet v = thin_set_near(dv, xi, r, window);
    const auto grid = geometric_grid(dv.mesh(), 32.0 * r);
    const auto cw = capacitary_width(space, v, eta, grid, options);
    CwBoundEntry e{r, cw.w, cw.w / r, cw.V.size()};
    out.entries.push_back(e);
    lo = std::min(lo, e.ratio);
    hi = std::max(hi, e.ratio);
  }
  out.A1 = hi;
  out.spread = std::isfinite(hi) && lo > 0.0 ? hi / lo : kInfinity;
  out.bounded = std::isfinite(out.spread) && out.spread <= 2.0;
  return out;
}

double calibrate_eta(const DomainView& dv, VertexId xi, double r, double rho, double window,
                     const CapacitaryWidthOptions& options) {
  const auto& space = capacity_space(dv);
  const VertexSet v = strided(thin_set_near(dv, xi, r, window), options.max_points);
  if (v.empty()) fail(ErrorKind::DegenerateDomain, "no thin points near the boundary vertex");
  const auto in_v = membership(space.vertex_count(), thin_set_near(dv, xi, r, window));
  double lo = kInfinity;
  for (VertexId x : v) lo = std::min(lo, capacity_ratio(space, in_v, x, rho, options.solver));
  return 0.5 * lo;
}

// --- harmonic measure ------------------------------------------------------------

HmDecayResult hm_decay_check(const WeightedGraph& g, std::span<const VertexId> V, VertexId x,
                             std::span<const double> r_list, double width, SolverOptions options) {
  if (!(width > 0.0)) fail(ErrorKind::InvalidArgument, "width must be positive");
  const auto in_v = membership(g.vertex_count(), V);
  if (!in_v.at(x)) fail(ErrorKind::DegenerateDomain, "x is not in V");
  const VertexId src[] = {x};
  const auto dist = shortest_distances(g, src);

  HmDecayResult out;
  out.width = width;
  std::vector<double> xs, ys;
  for (double r : r_list) {
    VertexSet omega;
    for (VertexId v = 0; v < g.vertex_count(); ++v)
      if (in_v[v] && dist[v] < r - kEps) omega.push_back(v);
    if (omega.empty()) fail(ErrorKind::DegenerateDomain, "trace domain is empty");
    const DirichletSolver solver(g, omega, options);
    Eigen::VectorXd data(static_cast<Eigen::Index>(solver.boundary().size()));
    for (std::size_t j = 0; j < solver.boundary().size(); ++j) data[j] = in_v[solver.boundary()[j]] ? 1.0 : 0.0;
    const double w = solver.extend(data)[solver.local(x)];
    if (!(w > 0.0)) fail(ErrorKind::DegenerateDomain, "harmonic measure of the spherical part vanishes");
    out.r.push_back(r);
    out.omega.push_back(w);
    xs.push_back(r / width);
    ys.push_back(std::log(w));
  }
  for (std::size_t i = 1; i < out.omega.size(); ++i)
    if (out.r[i] > out.r[i - 1] && out.omega[i] > out.omega[i - 1] + 1e-10) out.monotone = false;
  if (xs.size() >= 2) out.fit = fit_line(xs, ys);
  out.flat = std::abs(out.fit.slope) < 1e-6;
  return out;
}

HmGreenBoundResult hm_green_bound(const DomainView& dv, VertexId xi, double r, double A2, double c_U,
                                  SolverOptions options) {
  if (!dv.on_boundary(xi)) fail(ErrorKind::InvalidArgument, "xi must be a boundary vertex");
  if (!(A2 > 4.0 + c_U)) fail(ErrorKind::BadNesting, "A2 must exceed 4 + c_U so the far points lie inside");
  if (touches_frame(dv, xi, A2 * r)) fail(ErrorKind::ConfigRejected, "B_U(xi, A2 r) reaches the patch frame");
  HmGreenBoundResult out;
  out.A2 = A2;
  out.xi_r = far_point_at(dv, xi, 4.0 * r, 2.0 * c_U * r);
  out.xi_r_prime = far_point_at(dv, out.xi_r, c_U * r, 0.0);

  const DirichletSolver big(dv.graph(), dv.inner_ball(xi, A2 * r), options);
  const Eigen::VectorXd gp = big.green_column(out.xi_r);
  const double ref = gp[big.local(out.xi_r_prime)];

  const DirichletSolver small(dv.graph(), dv.inner_ball(xi, 2.0 * r), options);
  Eigen::VectorXd data(static_cast<Eigen::Index>(small.boundary().size()));
  for (std::size_t j = 0; j < small.boundary().size(); ++j)
    data[j] = dv.in_interior(small.boundary()[j]) ? 1.0 : 0.0;
  const Eigen::VectorXd omega = small.extend(data);

  const VertexSet inner = dv.inner_ball(xi, r);
  out.points = inner.size();
  for (VertexId x : inner) {
    const double rhs = gp[big.local(x)] / ref;
    const double lhs = omega[small.local(x)];
    const double q = lhs / rhs;
    if (q > out.C4) {
      out.C4 = q;
      out.witness = x;
    }
  }
  return out;
}

// --- Green comparisons -------------------------------------------------------------

GreenComparisonResult green_comparison_suite(const WeightedGraph& g, const GreenComparisonConfig& cfg,
                                             SolverOptions options) {
  if (!(cfg.r > 0.0) || !(cfg.A1 >= 2.0) || !(cfg.A2 > cfg.A1) || !(cfg.a > 0.0 && cfg.a <= 1.0))
    fail(ErrorKind::BadNesting, "need r > 0, 2 <= A1 < A2 and 0 < a <= 1");
  const VertexId src[] = {cfg.x0};
  const auto dist = shortest_distances(g, src, {}, cfg.A2 * cfg.r);
  auto ball = [&](double rad, bool closed) {
    VertexSet s;
    for (VertexId v = 0; v < g.vertex_count(); ++v)
      if (closed ? dist[v] <= rad + kEps : dist[v] < rad - kEps) s.push_back(v);
    return s;
  };
  const VertexSet d = ball(cfg.A1 * cfg.r, false);
  const VertexSet b_open = ball(cfg.r, false);
  const VertexSet b_closed = ball(cfg.r, true);
  GreenComparisonResult out;

  // (a) pairwise comparability on B(x0, r) inside D
  {
    const GreenTable gt(g, d, {.dense_limit = 4000, .solver = options});
    const VertexSet pts = strided(b_open, cfg.max_points);
    double hi = 0.0, lo = kInfinity;
    for (VertexId p : pts) {
      const VertexId s[] = {p};
      const auto dp = shortest_distances(g, s, {}, cfg.r / cfg.A2 + 1.0);
      const Eigen::VectorXd col = gt.column(p);
      for (VertexId q : pts) {
        if (dp[q] < cfg.r / cfg.A2 - kEps) continue;
        const double v = col[gt.solver().local(q)];
        hi = std::max(hi, v);
        lo = std::min(lo, v);
      }
    }
    out.C0 = (hi > 0.0 && std::isfinite(lo)) ? hi / lo : 1.0;

    // (b) the sphere is the inner vertex boundary of the closed ball, where the
    // equilibrium measure lives
    const auto in_closed = membership(g.vertex_count(), b_closed);
    const Eigen::VectorXd g0 = gt.column(cfg.x0);
    out.inf_sphere_green = kInfinity;
    for (VertexId y : b_closed) {
      bool edge = false;
      for (const auto& nb : g.neighbors(y)) edge = edge || !in_closed[nb.v];
      if (edge) out.inf_sphere_green = std::min(out.inf_sphere_green, g0[gt.solver().local(y)]);
    }
    out.cap_closed = capacity(g, d, b_closed, options).capacity;
    out.cap_open = capacity(g, d, b_open, options).capacity;
    out.b_lower = out.inf_sphere_green <= (1.0 / out.cap_closed) * (1.0 + kEps);
    out.b_middle = 1.0 / out.cap_closed <= (1.0 / out.cap_open) * (1.0 + kEps);
    out.C1 = (1.0 / out.cap_open) / out.inf_sphere_green;
  }

  // (c) capacities across radii
  out.cap_small = capacity(g, ball(cfg.A2 * cfg.r, false), ball(cfg.a * cfg.r, false), options).capacity;
  out.cap_mid = capacity(g, d, b_open, options).capacity;
  out.c_lower = out.cap_small <= out.cap_mid * (1.0 + kEps);
  out.C2 = out.cap_mid / out.cap_small;

  // (d) Green functions of nested balls on the sphere d(x0, y) = r
  {
    const DirichletSolver s1(g, d, options);
    const DirichletSolver s2(g, ball(cfg.A2 * cfg.r, false), options);
    const Eigen::VectorXd g1 = s1.green_column(cfg.x0);
    const Eigen::VectorXd g2 = s2.green_column(cfg.x0);
    out.d_lower = true;
    for (VertexId y = 0; y < g.vertex_count(); ++y) {
      if (std::abs(dist[y] - cfg.r) > kEps) continue;
      const double v1 = g1[s1.local(y)], v2 = g2[s2.local(y)];
      out.d_lower = out.d_lower && v1 <= v2 * (1.0 + kEps);
      out.C3 = std::max(out.C3, v2 / v1);
    }
  }
  return out;
}

// --- Harnack chains --------------------------------------------------------------------

ChainConsequence harnack_chain_consequence_check(const DomainView& dv, const VertexFunction& u, VertexId x1,
                                                 VertexId x2, double M, std::span<const double> radius_grid,
                                                 SolverOptions options) {
  const auto& g = dv.graph();
  if (u.size() != static_cast<Eigen::Index>(g.vertex_count()))
    fail(ErrorKind::InvalidArgument, "u must be indexed like the closure graph");
  ChainConsequence out;
  const VertexFunction lu = laplacian_apply(g, u);
  const double scale = std::max(u.cwiseAbs().maxCoeff(), 1e-300);
  for (VertexId x : dv.interior()) {
    if (u[x] < 0.0) fail(ErrorKind::InvalidArgument, "u must be non-negative");
    out.harmonic_residual = std::max(out.harmonic_residual, std::abs(lu[x]) * g.measure(x) / (g.weight(x) * scale));
  }
  if (out.harmonic_residual > 1e-8) fail(ErrorKind::InvalidArgument, "u is not harmonic on the domain");

  out.chain = harnack_chain_length(dv, x1, x2, M, radius_grid);
  out.N = out.chain.length;
  for (const auto& b : out.chain.balls) {
    try {
      out.C_H = std::max(out.C_H, ehi_constant(g, b.center, b.radius, 1.0 / M, options).C_H);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::EmptyHalfBall) throw;
    }
  }
  const double bound = std::pow(out.C_H, static_cast<double>(out.N));
  out.ratio = u[x1] > 0.0 ? u[x2] / u[x1] : (u[x2] > 0.0 ? kInfinity : 1.0);
  out.holds = u[x2] <= bound * u[x1] * (1.0 + kEps) && u[x1] <= bound * u[x2] * (1.0 + kEps);
  return out;
}

}  // namespace harnack
