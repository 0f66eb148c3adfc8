#include <doctest.h>

#include <cmath>

#include "harnack/domain.hpp"
#include "harnack/errors.hpp"
#include "harnack/gallery.hpp"

using namespace harnack;

namespace {

std::shared_ptr<const WeightedGraph> path_ptr(int n) {
  std::vector<EdgeSpec> e;
  for (int i = 0; i < n; ++i) e.push_back({VertexId(i), VertexId(i + 1), 1.0});
  return std::make_shared<const WeightedGraph>(build_graph(e));
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::IoError;
}

}  // namespace

TEST_CASE("domain view preconditions") {
  auto p = path_ptr(4);
  CHECK_NOTHROW(domain_view(p, {1, 2, 3}, {0, 4}));
  CHECK(kind_of([&] { domain_view(p, {1, 2, 3}, {0, 3, 4}); }) == ErrorKind::OverlappingSets);
  CHECK(kind_of([&] { domain_view(p, {2, 3}, {0, 1, 4}); }) == ErrorKind::IsolatedBoundaryVertex);
  CHECK(kind_of([&] { domain_view(p, {1, 3}, {0, 2, 4}); }) == ErrorKind::DisconnectedInterior);
  CHECK(kind_of([&] { domain_view(p, {}, {0, 1, 2, 3, 4}); }) == ErrorKind::EmptyInterior);
}

TEST_CASE("slit separates its two sides") {
  const double h = 0.5;
  auto inst = build_slit_grid(8, h);
  const double above[] = {-0.5, 0.5}, below[] = {-0.5, -0.5};
  const VertexId a = inst.vertex_at(above), b = inst.vertex_at(below);
  REQUIRE(inst.domain.in_interior(a));
  REQUIRE(inst.domain.in_interior(b));
  const double du = intrinsic_distance(inst.domain, a, b);
  const VertexId pa = inst.domain.project(a), pb = inst.domain.project(b);
  const std::vector<VertexId> src{pa};
  const double amb = shortest_distances(*inst.graph, src)[pb];
  CHECK(amb == doctest::Approx(2 * h));
  // the way round the tip (0,0) is 2 * 0.5 plus a few lattice steps
  CHECK(du >= 2 * 0.5);
  CHECK(du <= 2 * 0.5 + 4 * h + 1e-9);
  CHECK(du > amb);
}

TEST_CASE("inner balls, shells and the frame") {
  auto inst = build_grid(11, 11);
  const auto& dv = inst.domain;
  const VertexId c = inst.landmark("center");
  CHECK(dv.inner_ball(c, 1.5).size() == 5);
  CHECK(dv.inner_closed_ball(c, 1.0).size() == 5);
  CHECK(dv.inner_shell(c, 1.0, 1.0).size() == 4);
  CHECK_FALSE(touches_frame(dv, c, 4.0));
  CHECK(touches_frame(dv, c, 5.0));
  CHECK(dv.delta(c) == doctest::Approx(5.0));
  for (VertexId b : dv.boundary()) CHECK(dv.delta(b) == 0.0);
}

TEST_CASE("far points keep their clearance") {
  auto inst = build_half_plane(30);
  const auto& dv = inst.domain;
  const VertexId xi = inst.landmark("xi");
  for (double r : {4.0, 8.0, 16.0}) {
    const VertexId x = far_point(dv, xi, r, 0.5);
    CHECK(dv.delta(x) >= 0.5 * r / 4 - dv.mesh() - 1e-9);
    CHECK(std::abs(dv.distance(xi, x) - r / 4) <= dv.mesh() + 1e-9);
  }
  CHECK_THROWS_AS(far_point_at(dv, xi, 4.0, 40.0), Error);
}

TEST_CASE("inner uniform paths") {
  auto inst = build_slit_grid(10, 1.0);
  const auto& dv = inst.domain;
  const double p[] = {-3.0, 2.0}, q[] = {-3.0, -2.0};
  const VertexId x = inst.vertex_at(p), y = inst.vertex_at(q);
  auto path = inner_uniform_path(dv, x, y, 0.2);
  REQUIRE_FALSE(path.empty());
  CHECK(path.front() == x);
  CHECK(path.back() == y);
  CHECK(path_length(dv.graph(), path) >= dv.distance(x, y) - 1e-9);
  for (VertexId v : path) CHECK(dv.in_interior(v));

  PairSampling s;
  s.policy = PairPolicy::Sampled;
  s.random_pairs = 60;
  s.boundary_pairs = 30;
  auto cert = inner_uniformity_check(dv, 0.1, 8.0, s);
  CHECK(cert.status != CertificateStatus::Refuted);
  CHECK(cert.pairs_checked == 90);
  CHECK(cert.worst_ratio >= 1.0);
}

TEST_CASE("uniformity estimate on a box") {
  auto inst = build_grid(9, 9);
  auto est = estimate_inner_uniformity_constants(inst.domain);
  CHECK(est.c > 0.0);
  CHECK(std::isfinite(est.C));
  CHECK(est.C >= 1.0);
  CHECK(est.table.size() == 7);
}

TEST_CASE("harnack chains") {
  auto inst = build_grid(21, 21);
  const auto& dv = inst.domain;
  const double a[] = {3.0, 10.0}, b[] = {17.0, 10.0};
  const VertexId x = inst.vertex_at(a), y = inst.vertex_at(b);
  auto radii = dyadic_radii(8.0, 4);
  CHECK(radii == std::vector<double>{8.0, 4.0, 2.0, 1.0});
  CHECK(harnack_chain_length(dv, x, x, 2.0, radii).length == 1);
  const auto n2 = harnack_chain_length(dv, x, y, 2.0, radii).length;
  const auto n4 = harnack_chain_length(dv, x, y, 4.0, radii).length;
  CHECK(n2 >= 2);
  CHECK(n2 <= n4);
}
