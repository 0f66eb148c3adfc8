// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.
#include <sys/resource.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "harnack/bhp.hpp"
#include "harnack/errors.hpp"
#include "harnack/estimators.hpp"
#include "harnack/gallery.hpp"
#include "harnack/potential.hpp"
#include "support.hpp"

using namespace harnack;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream note;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) note << "first failure: " << what << "; ";
    ok = ok && cond;
  }
};

double rel_gap(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

double ratio_spread(double a, double b) { return std::max(a / b, b / a); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// measured constants kept for the tightness criterion
struct Reported {
  std::string what;
  Eigen::MatrixXd kernel;
  double value;
  double witness;
  bool cross;
};
std::vector<Reported> reported;

// --- 1 ----------------------------------------------------------------------

void green_oracle(Outcome& o) {
  std::vector<EdgeSpec> e{{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 4, 1}};
  auto p4 = build_graph(e);
  auto gt = green_table(p4, {1, 2, 3});
  Eigen::Matrix3d a;
  a << 2, -1, 0, -1, 2, -1, 0, -1, 2;
  const Eigen::Matrix3d inv = a.inverse();
  double err = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) err = std::max(err, std::abs(gt(i + 1, j + 1) - inv(i, j)));
  o.require(err <= 1e-12, "PATH(4) entrywise");
  o.require(std::abs(gt(1, 1) - 0.75) < 1e-12 && std::abs(gt(1, 2) - 0.5) < 1e-12 &&
                std::abs(gt(2, 2) - 1.0) < 1e-12 && std::abs(gt(1, 3) - 0.25) < 1e-12,
            "PATH(4) values");

  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(20, 200)(rng);
    auto g = testing::random_graph(rng, n, n / 2);
    auto omega = testing::random_domain(rng, g, n / 2);
    const Eigen::MatrixXd ref = testing::dense_dirichlet_matrix(g, omega).partialPivLu().inverse();
    auto table = green_table(g, omega);
    const auto& m = table.matrix();
    worst = std::max(worst, (m - ref).cwiseAbs().maxCoeff());
  }
  o.require(worst <= 1e-9, "random graphs vs dense LU");
  o.note << "PATH(4) err " << fmt(err) << ", 50 random graphs max err " << fmt(worst);
}

// --- 2 ----------------------------------------------------------------------

void axiom_suite(Outcome& o) {
  std::mt19937_64 rng(202);
  std::size_t mp_checked = 0, dom_checked = 0, dom_hyp_failed = 0;
  double sym = 0.0, minpos = kInfinity;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(30, 150)(rng);
    auto g = testing::random_graph(rng, n, n / 3);
    auto omega = testing::random_domain(rng, g, 2 * n / 3);
    auto gt = green_table(g, omega);
    const auto& m = gt.matrix();
    sym = std::max(sym, (m - m.transpose()).cwiseAbs().maxCoeff());
    minpos = std::min(minpos, m.minCoeff());

    // x0: deepest point of omega in hops; W: hop ball around x0 whose vertex boundary stays in omega
    auto out = membership(g.vertex_count(), omega);
    VertexSet complement;
    for (VertexId v = 0; v < g.vertex_count(); ++v)
      if (!out[v]) complement.push_back(v);
    const auto depth = shortest_distances(g, complement);
    VertexId x0 = omega[0];
    for (VertexId v : omega)
      if (depth[v] > depth[x0]) x0 = v;
    if (depth[x0] < 2.0) continue;
    const double rho = std::uniform_int_distribution<int>(1, static_cast<int>(depth[x0]) - 1)(rng);
    const auto w = closed_ball(g, x0, rho - 1.0 + 0.5);
    auto rep = check_maximum_principles(g, gt, x0, w, 1e-10);
    ++mp_checked;
    o.require(rep.inf_holds && rep.sup_holds, "maximum principles, instance " + std::to_string(t));

    // domination: c0 read off the sphere so the hypothesis holds, and a random c0
    const VertexId y = omega[std::uniform_int_distribution<std::size_t>(0, omega.size() - 1)(rng)];
    const double r = std::max(1.0, depth[x0] - 1.0);
    const auto sphere = vertex_boundary(g, open_ball(g, x0, r));
    double c0 = kInfinity;
    for (VertexId s : sphere)
      if (gt.solver().local(s) >= 0) c0 = std::min(c0, gt(y, s) / gt(x0, s));
    if (!std::isfinite(c0)) continue;
    for (double c : {c0, c0 * std::uniform_real_distribution<double>(0.5, 2.0)(rng)}) {
      auto d = check_green_domination(g, gt, y, x0, r, c);
      if (d.status == DominationStatus::HypothesisFailed) {
        ++dom_hyp_failed;
        continue;
      }
      ++dom_checked;
      o.require(d.status == DominationStatus::Holds, "domination, instance " + std::to_string(t));
    }
  }
  o.require(sym <= 1e-10, "symmetry");
  o.require(minpos > 0.0, "positivity");
  o.require(mp_checked >= 40, "enough maximum-principle instances");
  o.require(dom_checked >= 40, "enough domination instances");
  o.note << "asym " << fmt(sym) << ", min g " << fmt(minpos) << ", max-principle instances " << mp_checked
         << ", domination checks " << dom_checked << " (" << dom_hyp_failed << " hypothesis off)";
}

// --- 3 ----------------------------------------------------------------------

BhpConfig family_config(const GalleryInstance& inst, const std::string& family, double r) {
  BhpConfig c{inst.domain};
  c.r = r;
  if (family == "slit") {
    c.xi = inst.landmark("tip");
    c.A0 = 3.5;
    c.A3 = 2.5;
    c.A4 = 3.5;
  } else {
    c.xi = inst.landmark("xi");
    c.A0 = 8.0;
    c.A3 = 5.0;
    c.A4 = 10.0;
  }
  c.annulus_half_width = 0.5;
  return c;
}

GalleryInstance with_graph(const GalleryInstance& inst, WeightedGraph g) {
  auto p = std::make_shared<const WeightedGraph>(std::move(g));
  DomainView dv(p, inst.domain.interior(), inst.domain.boundary());
  dv.set_frame(inst.domain.frame());
  GalleryInstance out = inst;
  out.domain = dv;
  return out;
}

void invariance_suite(Outcome& o) {
  std::mt19937_64 rng(303);
  double worst_mu = 0.0, worst_g = 0.0, worst_cap = 0.0, worst_ch = 0.0;
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(60, 160)(rng);
    auto g = testing::random_graph(rng, n, n / 3);
    auto omega = testing::random_domain(rng, g, n / 2);
    std::vector<double> f(n);
    for (auto& x : f) x = std::exp(std::uniform_real_distribution<double>(-3, 3)(rng));
    const double lam = std::exp(std::uniform_real_distribution<double>(-3, 3)(rng));
    auto gm = rescale(g, 1.0, f);
    auto gw = rescale(g, lam, 1.0);

    auto a = green_table(g, omega), b = green_table(gm, omega), c = green_table(gw, omega);
    const double scale = a.matrix().cwiseAbs().maxCoeff();
    worst_mu = std::max(worst_mu, (a.matrix() - b.matrix()).cwiseAbs().maxCoeff() / scale);
    worst_g = std::max(worst_g, (lam * c.matrix() - a.matrix()).cwiseAbs().maxCoeff() / scale);

    auto ka = harmonic_measure_kernel(g, omega), kb = harmonic_measure_kernel(gm, omega);
    worst_mu = std::max(worst_mu, (ka.values - kb.values).cwiseAbs().maxCoeff());
    VertexFunction data = VertexFunction::Random(static_cast<Eigen::Index>(n));
    worst_mu = std::max(worst_mu, (solve_dirichlet(g, omega, data) - solve_dirichlet(gm, omega, data)).cwiseAbs().maxCoeff());

    std::vector<VertexId> target{omega[0]};
    const double cap = capacity(g, omega, target).capacity;
    worst_cap = std::max(worst_cap, rel_gap(capacity(gw, omega, target).capacity, lam * cap));

    const VertexId x = omega[omega.size() / 2];
    try {
      const double ch = ehi_constant(g, x, 3.0, 0.5).C_H;
      worst_ch = std::max(worst_ch, rel_gap(ehi_constant(gw, x, 3.0, 0.5).C_H, ch));
      worst_ch = std::max(worst_ch, rel_gap(ehi_constant(gm, x, 3.0, 0.5).C_H, ch));
    } catch (const Error&) {
      // ball without a boundary in a small random graph
    }
  }
  o.require(worst_mu <= 1e-10, "measure rescaling");
  o.require(worst_g <= 1e-10, "g scales by 1/lambda");
  o.require(worst_cap <= 1e-10, "Cap scales by lambda");
  o.require(worst_ch <= 1e-9, "C_H under scaling");

  double worst_c1 = 0.0;
  auto slit = build_slit_grid(30, 1.0);
  auto half = build_half_plane(50);
  for (auto [inst, fam] : {std::pair{&slit, "slit"}, std::pair{&half, "half"}}) {
    const double base = bhp_constant(family_config(*inst, fam, 4.0)).C1;
    std::vector<double> f(inst->domain.graph().vertex_count());
    for (auto& x : f) x = std::exp(std::uniform_real_distribution<double>(-2, 2)(rng));
    for (auto& gg : {rescale(inst->domain.graph(), 0.01, 1.0), rescale(inst->domain.graph(), 37.0, f)}) {
      const auto other = with_graph(*inst, gg);
      worst_c1 = std::max(worst_c1, rel_gap(bhp_constant(family_config(other, fam, 4.0)).C1, base));
    }
  }
  o.require(worst_c1 <= 1e-9, "BHP C1 under scaling");
  o.note << "mu " << fmt(worst_mu) << ", lambda g " << fmt(worst_g) << ", Cap " << fmt(worst_cap) << ", C_H "
         << fmt(worst_ch) << ", C1 " << fmt(worst_c1);
}

// --- 4 ----------------------------------------------------------------------

void exact_identities(Outcome& o) {
  double ruin = 0.0;
  for (int n : {4, 8, 16}) {
    auto inst = build_path(n);
    auto k = harmonic_measure_kernel(inst.domain.graph(), inst.domain.interior());
    for (int x = 1; x < n; ++x) ruin = std::max(ruin, std::abs(k(x, n) - double(x) / n));
  }
  o.require(ruin <= 1e-12, "gambler's ruin");

  std::mt19937_64 rng(404);
  double cap = 0.0;
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(20, 150)(rng);
    auto g = testing::random_graph(rng, n, n / 4);
    auto omega = testing::random_domain(rng, g, n / 2);
    const VertexId x0 = omega[std::uniform_int_distribution<std::size_t>(0, omega.size() - 1)(rng)];
    auto gt = green_table(g, omega);
    std::vector<VertexId> a{x0};
    cap = std::max(cap, std::abs(capacity(g, omega, a).capacity * gt(x0, x0) - 1.0));
  }
  o.require(cap <= 1e-9, "Cap g = 1");

  auto p4 = build_path(4);
  const double lam = lambda_min(p4.domain.graph(), {1, 2, 3});
  const double semi = semigroup_green_consistency(p4.domain.graph(), {1, 2, 3}, 40.0 / lam, 4000);
  o.require(semi <= 1e-6, "semigroup");
  o.note << "ruin " << fmt(ruin) << ", Cap g - 1 " << fmt(cap) << ", semigroup " << fmt(semi);
}

// --- 5 ----------------------------------------------------------------------

void record_ehi(const EhiEntry& e, const std::string& what) {
  const auto& k = e.half_ball;
  const auto col = k.column_of(e.z);
  const double w = k.values(k.row_of(e.x_max), col) / k.values(k.row_of(e.x_min), col);
  reported.push_back({what, k.values, e.C_H, w, false});
}

void ehi_desk(Outcome& o) {
  auto grid = build_grid(65, 65);
  const auto& g = grid.domain.graph();
  const double p1[] = {20, 20}, p2[] = {44, 40};
  const std::vector<VertexId> centers{grid.landmark("center"), grid.vertex_at(p1), grid.vertex_at(p2)};
  const std::vector<double> radii{4, 8, 16};
  auto scan = ehi_scan(g, centers, radii, 0.5);
  bool finite = true;
  for (const auto& e : scan.entries) {
    finite = finite && std::isfinite(e.C_H);
    record_ehi(e, "grid C_H");
  }
  o.require(finite, "finite grid constants");
  o.require(scan.scale_stability <= 2.0, "grid scale ratio");

  AlphaLatticeOptions lo;
  lo.dim = 1;
  lo.N = 300;
  lo.alpha = 2;
  auto line = build_weighted_lattice_alpha(lo);
  std::vector<double> ch;
  for (double R : {16.0, 32.0, 64.0, 128.0, 256.0}) {
    auto e = ehi_constant(line.domain.graph(), line.landmark("origin"), R, 0.5);
    ch.push_back(e.C_H);
    record_ehi(e, "line C_H");
  }
  bool mono = true;
  for (std::size_t i = 1; i < ch.size(); ++i) mono = mono && ch[i] > ch[i - 1];
  o.require(mono, "1-D monotone");
  o.require(ch.front() > 10.0, "1-D exceeds 10");
  o.note << "grid sup " << fmt(scan.sup) << " stability " << fmt(scan.scale_stability) << "; 1-D C_H";
  for (double c : ch) o.note << " " << fmt(c);
}

// --- 6, 7, 9 (annulus) --------------------------------------------------------

struct Family {
  std::string name;
  GalleryInstance inst;
};

std::vector<Family> families(bool cable) {
  std::vector<Family> out;
  auto slit = build_slit_grid(60, 1.0);
  auto half = build_half_plane(170);
  AlphaLatticeOptions ao;
  ao.N = 170;
  ao.alpha = 3;
  ao.sign = -1;
  ao.carve = Carve::HalfPlane;
  auto alpha = build_weighted_lattice_alpha(ao);
  out.push_back({"slit", slit});
  out.push_back({"half", half});
  out.push_back({"alpha", alpha});
  if (cable) {
    out.push_back({"slit", cable_refine(slit, 2)});
    out.push_back({"half", cable_refine(half, 2)});
  }
  return out;
}

std::string label(const Family& f) {
  const auto it = f.inst.params.find("cable_k");
  return f.name + (it != f.inst.params.end() ? "/k" + fmt(it->second) : "");
}

std::vector<std::vector<double>> c1_table;  // per family: C1(8), C1(16)

void bhp_stability(Outcome& o, const std::vector<Family>& fams) {
  for (const auto& f : fams) {
    std::vector<double> c1;
    for (double r : {8.0, 16.0}) {
      auto m = bhp_constant(family_config(f.inst, f.name, r));
      o.require(std::isfinite(m.C1) && m.C1 >= 1.0, label(f) + " finite C1");
      c1.push_back(m.C1);
      reported.push_back({label(f) + " C1", m.cone.values, m.C1, witness_ratio(m.cone, m.witness), true});
    }
    const double s = ratio_spread(c1[0], c1[1]);
    o.require(s <= 2.0, label(f) + " scale ratio");
    o.note << label(f) << " " << fmt(c1[0]) << "/" << fmt(c1[1]) << "  ";
    c1_table.push_back(c1);
  }
  // cable k = 2 against k = 1 (families 3, 4 refine 0, 1)
  for (std::size_t i = 3; i < fams.size(); ++i)
    for (int j = 0; j < 2; ++j)
      o.require(ratio_spread(c1_table[i][j], c1_table[i - 3][j]) <= 2.0, label(fams[i]) + " vs k=1");
}

void cross_ratio_stability(Outcome& o, const std::vector<Family>& fams) {
  double swap = 0.0;
  for (const auto& f : fams) {
    std::vector<double> v;
    for (double r : {8.0, 16.0}) {
      auto g = green_cross_ratio(family_config(f.inst, f.name, r));
      o.require(std::isfinite(g.value), label(f) + " finite");
      v.push_back(g.value);
      const double fwd = cross_ratio(g.green, g.x1, g.x2, g.y1, g.y2);
      const double back = cross_ratio(g.green, g.x2, g.x1, g.y1, g.y2);
      swap = std::max(swap, std::abs(fwd * back - 1.0));
    }
    o.require(ratio_spread(v[0], v[1]) <= 2.0, label(f) + " scale ratio");
    o.note << label(f) << " " << fmt(v[0]) << "/" << fmt(v[1]) << "  ";
  }
  o.require(swap <= 1e-12, "swap inverts");
  o.note << "swap err " << fmt(swap);
}

// --- 8 ----------------------------------------------------------------------

void one_dimensional(Outcome& o) {
  std::vector<GalleryInstance> lines;
  lines.push_back(build_path(64));
  for (double alpha : {0.0, 2.0, 3.0})
    for (int sign : {1, -1}) {
      AlphaLatticeOptions lo;
      lo.dim = 1;
      lo.N = 64;
      lo.alpha = alpha;
      lo.sign = sign;
      lines.push_back(build_weighted_lattice_alpha(lo));
    }
  double worst = 0.0;
  std::size_t cases = 0;
  for (const auto& line : lines) {
    const double lo = line.graph->coord(0)[0];
    for (auto [a, b] : {std::pair{lo + 2, lo + 40}, std::pair{lo + 10, lo + 64}, std::pair{lo + 0, lo + 50}}) {
      auto iv = build_interval_domain(line, a, b);
      for (int k : {1, 2}) {
        auto inst = cable_refine(iv, k);
        for (const char* end : {"a", "b"}) {
          BhpConfig c{inst.domain};
          c.xi = inst.landmark(end);
          c.r = 4.0;
          c.c_U = 1.0;
          c.C_U = 1.0;
          c.A0 = 1.5;
          auto m = bhp_constant(c);
          worst = std::max(worst, std::abs(m.C1 - 1.0));
          ++cases;
        }
      }
    }
  }
  o.require(worst <= 1e-9, "C1 = 1 on intervals");
  o.note << cases << " interval cases, max |C1 - 1| " << fmt(worst);
}

// --- 9 ----------------------------------------------------------------------

void lemma_pipeline(Outcome& o, const std::vector<Family>& fams) {
  const std::vector<double> rs{2, 4, 8, 16};
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& f = fams[i];
    auto cw = cw_linear_bound_check(f.inst.domain, family_config(f.inst, f.name, 8).xi, 0.1, rs);
    o.require(cw.bounded && cw.spread <= 2.0, label(f) + " cw ratio");
    o.note << label(f) << " w/r spread " << fmt(cw.spread) << "; ";
  }

  const auto& half = fams[1].inst;
  const auto& amb = half.domain.ambient();
  VertexSet strip;
  for (VertexId v = 0; v < amb.vertex_count(); ++v)
    if (amb.coord(v)[1] >= 1.0 - 1e-9 && amb.coord(v)[1] <= 2.0 + 1e-9) strip.push_back(v);
  VertexId x = 0;
  for (VertexId v = 0; v < amb.vertex_count(); ++v)
    if (amb.coord(v)[0] == 0.0 && amb.coord(v)[1] == 1.0) x = v;
  const double width = capacitary_width(amb, strip, 0.1, geometric_grid(1.0, 64.0)).w;
  const std::vector<double> hr{4, 8, 16, 32};
  auto decay = hm_decay_check(amb, strip, x, hr, width);
  o.require(decay.fit.slope < 0.0 && !decay.flat && decay.fit.r2 >= 0.9, "strip decay");
  o.note << "strip slope " << fmt(decay.fit.slope) << " R2 " << fmt(decay.fit.r2) << "; ";

  std::vector<double> c4;
  for (double r : {8.0, 16.0}) c4.push_back(hm_green_bound(half.domain, half.landmark("xi"), r, 6.0, 0.25).C4);
  o.require(std::isfinite(c4[0]) && std::isfinite(c4[1]) && ratio_spread(c4[0], c4[1]) <= 2.0, "C4 stability");
  o.note << "C4 " << fmt(c4[0]) << "/" << fmt(c4[1]) << "; ";

  std::size_t certified = 0, violations = 0;
  for (const auto& f : fams)
    for (double r : {8.0, 16.0}) {
      auto ann = annulus_bound_check(family_config(f.inst, f.name, r), 100, 9);
      certified += ann.curves_certified;
      violations += ann.curve_violations;
    }
  o.require(violations == 0, "curve avoidance");
  o.require(certified > 0, "some curves certified");
  o.note << "curves certified " << certified << " violations " << violations;
}

// --- 10 ---------------------------------------------------------------------

void tightness(Outcome& o) {
  double excess = 0.0, attain = 0.0;
  std::uint64_t seed = 1000;
  for (const auto& r : reported) {
    const double s = r.cross ? sampled_cross_ratio(r.kernel, 100, seed++) : sampled_spread(r.kernel, 100, seed++);
    excess = std::max(excess, (s - r.value) / r.value);
    attain = std::max(attain, rel_gap(r.witness, r.value));
    o.require(s <= r.value * (1 + 1e-9), r.what + " sampled above reported");
    o.require(rel_gap(r.witness, r.value) <= 1e-9, r.what + " witness");
  }
  o.note << reported.size() << " constants, max sampled excess " << fmt(excess) << ", witness gap " << fmt(attain);
}

}  // namespace

int main() {
  const auto start = Clock::now();
  int failures = 0;
  auto run = [&](int id, const char* title, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      body(o);
    } catch (const std::exception& e) {
      o.ok = false;
      o.note << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("[%s] %2d %-28s %7.1f s  %s\n", o.ok ? "PASS" : "FAIL", id, title, secs, o.note.str().c_str());
    std::fflush(stdout);
    failures += o.ok ? 0 : 1;
  };

  std::vector<Family> fams;
  run(1, "green oracle", green_oracle);
  run(2, "axiom suite", axiom_suite);
  run(3, "invariance suite", invariance_suite);
  run(4, "exact identities", exact_identities);
  run(5, "EHI desk scale", ehi_desk);
  run(6, "BHP scale stability", [&](Outcome& o) {
    fams = families(true);
    bhp_stability(o, fams);
  });
  run(7, "Green cross-ratio", [&](Outcome& o) { cross_ratio_stability(o, fams); });
  run(8, "one-dimensional exactness", one_dimensional);
  run(9, "boundary lemma pipeline", [&](Outcome& o) { lemma_pipeline(o, fams); });
  run(10, "extremal-ray tightness", tightness);
  run(11, "time and memory", [&](Outcome& o) {
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    rusage ru{};
    getrusage(RUSAGE_SELF, &ru);
    const double mb = ru.ru_maxrss / 1024.0;
    o.require(secs < 600.0, "wall clock");
    o.require(mb < 2048.0, "peak memory");
    o.note << "total " << fmt(secs) << " s, peak rss " << fmt(mb) << " MB";
  });
  return failures == 0 ? 0 : 1;
}
