#include <doctest.h>

#include <cmath>
#include <random>

#include "harnack/errors.hpp"
#include "harnack/estimators.hpp"
#include "harnack/gallery.hpp"

using namespace harnack;

TEST_CASE("column spread and cross ratio against brute force") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.01, 3.0);
  for (int t = 0; t < 20; ++t) {
    Eigen::MatrixXd k(6, 5);
    for (Eigen::Index i = 0; i < k.size(); ++i) k.data()[i] = u(rng);
    double spread = 1.0, cross = 1.0;
    for (int j = 0; j < 5; ++j) spread = std::max(spread, k.col(j).maxCoeff() / k.col(j).minCoeff());
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b)
        for (int j = 0; j < 5; ++j)
          for (int l = 0; l < 5; ++l) cross = std::max(cross, k(a, j) * k(b, l) / (k(b, j) * k(a, l)));
    auto s = max_column_spread(k);
    auto c = max_cross_ratio(k);
    CHECK(s.value == doctest::Approx(spread).epsilon(1e-12));
    CHECK(c.value == doctest::Approx(cross).epsilon(1e-12));
    const double w = k(c.row_a, c.column_ab) * k(c.row_b, c.column_ba) /
                     (k(c.row_b, c.column_ab) * k(c.row_a, c.column_ba));
    CHECK(w == doctest::Approx(c.value).epsilon(1e-12));
    CHECK(sampled_spread(k, 100, t) <= s.value * (1 + 1e-12));
    CHECK(sampled_cross_ratio(k, 100, t) <= c.value * (1 + 1e-12));
  }
}

TEST_CASE("vanishing columns are skipped") {
  Eigen::MatrixXd k(2, 3);
  k << 1, 0, 2, 2, 5, 2;
  auto s = max_column_spread(k);
  CHECK(s.skipped_columns == 1);
  CHECK(s.value == doctest::Approx(2.0));
}

TEST_CASE("EHI on a grid") {
  auto inst = build_grid(33, 33);
  const auto& g = inst.domain.graph();
  const VertexId c = inst.landmark("center");
  auto e = ehi_constant(g, c, 8.0, 0.5);
  CHECK(std::isfinite(e.C_H));
  CHECK(e.C_H > 1.0);
  const auto col = e.half_ball.column_of(e.z);
  const auto& v = e.half_ball.values;
  CHECK(v(e.half_ball.row_of(e.x_max), col) / v(e.half_ball.row_of(e.x_min), col) ==
        doctest::Approx(e.C_H).epsilon(1e-12));
  auto scaled = ehi_constant(rescale(g, 7.0, 1.0), c, 8.0, 0.5);
  CHECK(scaled.C_H == doctest::Approx(e.C_H).epsilon(1e-9));
  CHECK_THROWS_AS(ehi_constant(g, c, 1.0, 0.5), Error);

  const std::vector<VertexId> centers{c};
  const std::vector<double> radii{8.0, 4.0};
  auto scan = ehi_scan(g, centers, radii, 0.5);
  REQUIRE(scan.entries.size() == 2);
  CHECK(scan.entries[0].R == 4.0);
  CHECK(scan.scale_stability >= 1.0);
}

TEST_CASE("capacitary width") {
  auto inst = build_grid(25, 25);
  const auto& g = inst.domain.graph();
  const VertexId c = inst.landmark("center");
  std::vector<char> none(g.vertex_count(), 0);
  CHECK(capacity_ratio(g, none, c, 3.0) == doctest::Approx(1.0));
  std::vector<char> all(g.vertex_count(), 1);
  CHECK(capacity_ratio(g, all, c, 3.0) == 0.0);

  auto grid = geometric_grid(1.0, 8.0);
  CHECK(grid.front() == 1.0);
  CHECK(grid.size() == 13);
  CHECK(capacitary_width(g, {}, 0.5, grid).w == 1.0);

  // a single row: removing one line of a ball leaves most of its capacity
  VertexSet row;
  for (int i = 4; i <= 20; ++i) {
    const double p[] = {double(i), 12.0};
    row.push_back(inst.vertex_at(p));
  }
  row = make_set(row);
  auto cw = capacitary_width(g, row, 0.2, grid);
  CHECK(std::isfinite(cw.w));
  CHECK(cw.worst_ratio >= 0.2);
}

TEST_CASE("harmonic measure decays along a strip") {
  auto inst = build_grid(61, 5);
  const auto& g = inst.domain.graph();
  VertexSet strip = inst.domain.interior();
  const double p[] = {30.0, 2.0};
  const std::vector<double> radii{4, 8, 12, 16, 20, 24};
  auto res = hm_decay_check(g, strip, inst.vertex_at(p), radii, 2.0);
  CHECK(res.fit.slope < 0.0);
  CHECK(res.fit.r2 >= 0.9);
  CHECK(res.monotone);
  CHECK_FALSE(res.flat);
}

TEST_CASE("green comparison on a grid") {
  auto inst = build_grid(41, 41);
  GreenComparisonConfig cfg;
  cfg.x0 = inst.landmark("center");
  cfg.r = 4.0;
  cfg.A1 = 2.0;
  cfg.A2 = 4.0;
  auto res = green_comparison_suite(inst.domain.graph(), cfg);
  CHECK(res.constant_free_ok());
  CHECK(std::isfinite(res.C0));
  CHECK(res.C3 >= 1.0 - 1e-12);
}

TEST_CASE("chain consequence for a kernel column") {
  auto inst = build_grid(21, 21);
  const auto& dv = inst.domain;
  auto k = harmonic_measure_kernel(dv.graph(), dv.interior());
  VertexFunction u = VertexFunction::Zero(dv.graph().vertex_count());
  const auto col = k.column_of(dv.boundary()[5]);
  for (std::size_t i = 0; i < k.rows.size(); ++i) u[k.rows[i]] = k.values(i, col);
  u[dv.boundary()[5]] = 1.0;
  const double a[] = {5.0, 10.0}, b[] = {15.0, 10.0};
  auto radii = dyadic_radii(8.0, 3);
  auto res = harnack_chain_consequence_check(dv, u, inst.vertex_at(a), inst.vertex_at(b), 2.0, radii);
  CHECK(res.holds);
  CHECK(res.N >= 1);
  CHECK(res.harmonic_residual <= 1e-8);
}
