#include "harnack/bhp.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "harnack/errors.hpp"
#include "harnack/estimators.hpp"

namespace harnack {

namespace {

constexpr double kEps = 1e-9;

double proof_A3(double c_U) { return std::max(2.0 + 2.0 / c_U, 7.0); }

// K restricted to (rows, cols), solving on whichever side is smaller.
Eigen::MatrixXd kernel_block(const DirichletSolver& s, const VertexSet& rows, const VertexSet& cols) {
  if (rows.size() < cols.size()) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Eigen::VectorXd full = s.coupling().transpose() * s.green_column(rows[i]);
      for (std::size_t j = 0; j < cols.size(); ++j)
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = full[s.boundary_local(cols[j])];
    }
    return out;
  }
  return kernel_columns(s, cols, rows).values;
}

// g restricted to (rows, cols); g is symmetric so either side can be solved.
Eigen::MatrixXd green_block(const DirichletSolver& s, const VertexSet& rows, const VertexSet& cols) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  if (cols.size() <= rows.size()) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const Eigen::VectorXd g = s.green_column(cols[j]);
      for (std::size_t i = 0; i < rows.size(); ++i)
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g[s.local(rows[i])];
    }
  } else {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Eigen::VectorXd g = s.green_column(rows[i]);
      for (std::size_t j = 0; j < cols.size(); ++j)
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g[s.local(cols[j])];
    }
  }
  return out;
}

std::optional<VertexId> best_on_shell(const DomainView& dv, VertexId center, double s, double clearance) {
  const auto delta = dv.delta();
  std::optional<VertexId> best;
  for (VertexId v : dv.inner_shell(center, s, dv.mesh())) {
    if (delta[v] < clearance - dv.mesh() - kEps) continue;
    if (!best || delta[v] > delta[*best]) best = v;
  }
  return best;
}

double diameter_estimate(const DomainView& dv, VertexId start) {
  auto far = [&](VertexId s) {
    const auto d = dv.distances_from(s);
    VertexId arg = s;
    for (VertexId v : dv.interior())
      if (std::isfinite((*d)[v]) && (*d)[v] > (*d)[arg]) arg = v;
    return std::pair{arg, (*d)[arg]};
  };
  const auto [a, da] = far(start);
  return std::max(da, far(a).second);
}

}  // namespace

BhpConstants default_bhp_constants(double c_U, double C_U) {
  BhpConstants k;
  k.A2 = 2.0 * (12.0 + C_U);
  k.A3 = proof_A3(c_U);
  k.A4 = k.A2 + C_U * (k.A3 + 0.25 * c_U * c_U + 8.0);
  k.A5 = k.A3 + k.A4;
  k.A0 = k.A5;
  return k;
}

BhpConstants BhpConfig::constants() const {
  BhpConstants k = default_bhp_constants(c_U, C_U);
  if (A2) k.A2 = *A2;
  if (A3) k.A3 = *A3;
  k.A4 = A4 ? *A4 : k.A2 + C_U * (k.A3 + 0.25 * c_U * c_U + 8.0);
  k.A5 = k.A3 + k.A4;
  k.A0 = A0 ? *A0 : k.A5;
  return k;
}

void validate(const BhpConfig& cfg) {
  const auto& dv = cfg.domain;
  if (!(cfg.c_U > 0.0 && cfg.c_U <= 1.0) || !(cfg.C_U >= 1.0))
    fail(ErrorKind::ConfigRejected, "inner uniformity constants need 0 < c_U <= 1 <= C_U");
  if (cfg.r < 4.0 * dv.mesh() - kEps) fail(ErrorKind::ConfigRejected, "r is below four mesh units");
  if (cfg.xi >= dv.graph().vertex_count() || !dv.on_boundary(cfg.xi))
    fail(ErrorKind::ConfigRejected, "xi must be a boundary vertex");
  if (dv.on_frame(cfg.xi)) fail(ErrorKind::ConfigRejected, "xi lies on the patch frame");
  const BhpConstants k = cfg.constants();
  if (!(k.A0 > 1.0 && k.A3 > 2.0 && k.A4 > k.A3 && cfg.annulus_half_width > 0.0))
    fail(ErrorKind::ConfigRejected, "need A0 > 1, 2 < A3 < A4 and a positive annulus width");
  const double reach = std::max({k.A0, k.A4, k.A3 + cfg.annulus_half_width}) * cfg.r;
  if (!dv.frame().empty()) {
    if (touches_frame(dv, cfg.xi, reach)) fail(ErrorKind::ConfigRejected, "the largest ball reaches the patch frame");
  } else {
    const double limit = diameter_estimate(dv, cfg.xi) / (4.0 * k.A0 * cfg.C_U);
    if (cfg.r > limit + kEps) fail(ErrorKind::ConfigRejected, "r exceeds diam(U) / (4 A0 C_U)");
  }
}

KernelCone boundary_kernel_cone(const BhpConfig& cfg, std::optional<VertexSet> rows) {
  validate(cfg);
  const auto& dv = cfg.domain;
  const BhpConstants k = cfg.constants();
  const DirichletSolver solver(dv.graph(), dv.inner_ball(cfg.xi, k.A0 * cfg.r), cfg.solver);
  VertexSet free;
  for (VertexId z : solver.boundary())
    if (dv.in_interior(z)) free.push_back(z);
  if (free.empty()) fail(ErrorKind::EmptyFreeBoundary, "the whole boundary of D carries Dirichlet data");
  KernelCone cone;
  cone.rows = rows ? make_set(*rows) : dv.inner_ball(cfg.xi, cfg.r);
  for (VertexId x : cone.rows)
    if (solver.local(x) < 0) fail(ErrorKind::InvalidArgument, "kernel rows must lie in D");
  cone.columns = free;
  cone.values = kernel_block(solver, cone.rows, cone.columns);
  return cone;
}

double witness_ratio(const KernelCone& cone, const BhpWitness& w) {
  return (cone(w.x, w.z) / cone(w.y, w.z)) * (cone(w.y, w.z_prime) / cone(w.x, w.z_prime));
}

BhpMeasurement bhp_constant(const BhpConfig& cfg) {
  BhpMeasurement out;
  out.constants = cfg.constants();
  try {
    out.cone = boundary_kernel_cone(cfg);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::EmptyFreeBoundary) throw;
    out.trivial_cone = true;
    return out;
  }
  if (out.cone.rows.empty()) fail(ErrorKind::EmptyCone, "no kernel rows");
  const CrossRatio cr = max_cross_ratio(out.cone.values);
  if (cr.skipped_columns == out.cone.columns.size()) fail(ErrorKind::EmptyCone, "every kernel column vanishes");
  out.skipped_columns = cr.skipped_columns;
  out.C1 = cr.value;
  out.witness.ratio = cr.value;
  out.witness.x = out.cone.rows[cr.row_a];
  out.witness.y = out.cone.rows[cr.row_b];
  out.witness.z = out.cone.columns[cr.column_ab];
  out.witness.z_prime = out.cone.columns[cr.column_ba];
  try {
    const SpecialPoints sp = special_points(cfg);
    out.witness.x_star = sp.x_star;
    out.witness.y_star = sp.y_star;
    out.witness.z_star = sp.z_star;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoSpecialPoint) throw;
  }
  return out;
}

GreenCrossRatio green_cross_ratio(const BhpConfig& cfg) {
  validate(cfg);
  const auto& dv = cfg.domain;
  const BhpConstants k = cfg.constants();
  const DirichletSolver solver(dv.graph(), dv.inner_ball(cfg.xi, k.A4 * cfg.r), cfg.solver);
  GreenCrossRatio out;
  out.green.rows = dv.inner_ball(cfg.xi, cfg.r);
  out.green.columns = dv.inner_shell(cfg.xi, k.A3 * cfg.r, dv.mesh());
  if (out.green.rows.empty() || out.green.columns.empty()) fail(ErrorKind::EmptySphere, "a point set is empty");
  for (VertexId y : out.green.columns)
    if (solver.local(y) < 0) fail(ErrorKind::BadNesting, "the A3 sphere leaves D");
  out.green.values = green_block(solver, out.green.rows, out.green.columns);
  const CrossRatio cr = max_cross_ratio(out.green.values);
  out.value = cr.value;
  out.x1 = out.green.rows[cr.row_a];
  out.x2 = out.green.rows[cr.row_b];
  out.y1 = out.green.columns[cr.column_ab];
  out.y2 = out.green.columns[cr.column_ba];
  return out;
}

double cross_ratio(const KernelCone& green, VertexId x1, VertexId x2, VertexId y1, VertexId y2) {
  return (green(x1, y1) * green(x2, y2)) / (green(x2, y1) * green(x1, y2));
}

SpecialPoints special_points(const BhpConfig& cfg) {
  const auto& dv = cfg.domain;
  const BhpConstants k = cfg.constants();
  const auto xs = best_on_shell(dv, cfg.xi, cfg.r, cfg.c_U * cfg.r);
  const auto ys = best_on_shell(dv, cfg.xi, k.A3 * cfg.r, k.A3 * cfg.c_U * cfg.r);
  if (!xs || !ys) fail(ErrorKind::NoSpecialPoint, "no vertex meets the clearance for x* or y*");
  SpecialPoints p;
  p.x_star = *xs;
  p.y_star = *ys;
  p.curve = inner_uniform_path(dv, p.y_star, p.x_star, cfg.c_U);
  if (p.curve.empty()) fail(ErrorKind::NoSpecialPoint, "no admissible curve from y* to x*");
  const auto d = dv.distances_from(p.y_star);
  const double s = cfg.c_U * cfg.r;
  bool found = false;
  for (VertexId v : p.curve)
    if ((*d)[v] >= s - kEps && (*d)[v] < s + dv.mesh() - kEps) {
      p.z_star = v;
      found = true;
    }
  if (!found) fail(ErrorKind::NoSpecialPoint, "the curve from y* never meets the c_U r sphere");
  return p;
}

Gc1Report gc1_decomposition_check(const BhpConfig& cfg) {
  validate(cfg);
  const auto& dv = cfg.domain;
  const BhpConstants k = cfg.constants();
  Gc1Report out;
  out.points = special_points(cfg);
  const VertexId xs = out.points.x_star, ys = out.points.y_star;

  const DirichletSolver solver(dv.graph(), dv.inner_ball(cfg.xi, k.A4 * cfg.r), cfg.solver);
  const VertexSet X = dv.inner_ball(cfg.xi, cfg.r);
  const VertexSet Y = dv.inner_shell(cfg.xi, k.A3 * cfg.r, dv.mesh());
  if (X.empty() || Y.empty()) fail(ErrorKind::EmptySphere, "a point set is empty");
  VertexSet cols = Y;
  cols.push_back(ys);
  cols = make_set(std::move(cols));
  VertexSet rows = X;
  rows.push_back(xs);
  rows = make_set(std::move(rows));
  for (VertexId v : cols)
    if (solver.local(v) < 0) fail(ErrorKind::BadNesting, "the A3 sphere leaves D");
  const Eigen::MatrixXd G = green_block(solver, rows, cols);
  auto at = [&](VertexId x, VertexId y) {
    const auto i = std::lower_bound(rows.begin(), rows.end(), x) - rows.begin();
    const auto j = std::lower_bound(cols.begin(), cols.end(), y) - cols.begin();
    return G(i, j);
  };
  const double gss = at(xs, ys);
  const auto delta = dv.delta();
  const double far_cut = 0.25 * cfg.c_U * cfg.c_U * cfg.r;
  double lo = kInfinity, hi = 0.0;
  for (VertexId y : Y) {
    const bool far = delta[y] >= far_cut - kEps;
    const double gsy = at(xs, y);
    for (VertexId x : X) {
      const double q = at(x, y) * gss / (gsy * at(x, ys));
      out.rows.push_back({x, y, q, far});
      lo = std::min(lo, q);
      hi = std::max(hi, q);
      if (far) {
        ++out.far_count;
        out.far_min = std::min(out.far_min, q);
        out.far_max = std::max(out.far_max, q);
      } else {
        ++out.near_count;
        out.near_min = std::min(out.near_min, q);
        out.near_max = std::max(out.near_max, q);
      }
    }
  }
  out.spread = hi / lo;
  return out;
}

AnnulusReport annulus_bound_check(const BhpConfig& cfg, std::size_t curve_pairs, std::uint64_t seed) {
  validate(cfg);
  const auto& dv = cfg.domain;
  const BhpConstants k = cfg.constants();
  AnnulusReport out;
  const SpecialPoints sp = special_points(cfg);
  out.y_star = sp.y_star;

  const DirichletSolver solver(dv.graph(), dv.inner_ball(cfg.xi, k.A4 * cfg.r), cfg.solver);
  const VertexSet X = dv.inner_ball(cfg.xi, 2.0 * cfg.r);
  const double w = cfg.annulus_half_width;
  const auto dxi = dv.distances_from(cfg.xi);
  VertexSet F;
  for (VertexId v : dv.inner_ball(cfg.xi, (k.A3 + w) * cfg.r))
    if ((*dxi)[v] >= (k.A3 - w) * cfg.r - kEps) F.push_back(v);
  out.annulus_size = F.size();
  for (VertexId v : F)
    if (solver.local(v) < 0) fail(ErrorKind::BadNesting, "the annulus leaves D");
  VertexSet cols = F;
  cols.push_back(sp.y_star);
  cols = make_set(std::move(cols));
  const Eigen::MatrixXd G = green_block(solver, X, cols);
  const auto jy = std::lower_bound(cols.begin(), cols.end(), sp.y_star) - cols.begin();
  for (std::size_t i = 0; i < X.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const double q = G(ii, static_cast<Eigen::Index>(j)) / G(ii, jy);
      if (q > out.max_ratio) {
        out.max_ratio = q;
        out.x = X[i];
        out.z = cols[j];
      }
    }
  }

  // curve geometry, read at the scale where the configured A3 r sphere is the
  // A3p r' sphere of the unmodified constant
  const double A3p = proof_A3(cfg.c_U);
  const double rp = cfg.r * k.A3 / A3p;
  out.curve_A3 = A3p;
  out.curve_scale = rp;
  const VertexSet S = dv.inner_shell(cfg.xi, A3p * rp, dv.mesh());
  if (S.size() < 2) return out;
  std::vector<std::pair<VertexId, VertexId>> pairs;
  const std::size_t all = S.size() * (S.size() - 1) / 2;
  if (all <= curve_pairs) {
    for (std::size_t i = 0; i < S.size(); ++i)
      for (std::size_t j = i + 1; j < S.size(); ++j) pairs.emplace_back(S[i], S[j]);
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, S.size() - 1);
    while (pairs.size() < curve_pairs) {
      const std::size_t i = pick(rng), j = pick(rng);
      if (i != j) pairs.emplace_back(S[std::min(i, j)], S[std::max(i, j)]);
    }
  }
  const double inner = 2.0 * rp;
  const double outer = A3p * (cfg.C_U + 1.0) * rp + (cfg.C_U + 1.0) * dv.mesh();
  for (const auto& [a, b] : pairs) {
    CurveCheck c;
    c.y1 = a;
    c.y2 = b;
    c.distance = dv.distance(a, b);
    const auto path = inner_uniform_path(dv, a, b, cfg.c_U);
    if (!path.empty()) c.length = path_length(dv.graph(), path);
    c.certified = c.length <= cfg.C_U * c.distance + kEps;
    if (!c.certified) {
      ++out.curves_skipped;
      out.curves.push_back(c);
      continue;
    }
    ++out.curves_certified;
    c.min_distance = kInfinity;
    for (VertexId v : path) {
      c.min_distance = std::min(c.min_distance, (*dxi)[v]);
      c.max_distance = std::max(c.max_distance, (*dxi)[v]);
    }
    c.avoids_inner = c.min_distance >= inner - kEps;
    c.stays_inside = c.max_distance <= outer + kEps;
    if (!c.avoids_inner || !c.stays_inside) ++out.curve_violations;
    out.curves.push_back(c);
  }
  return out;
}

}  // namespace harnack
