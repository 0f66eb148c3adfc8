#include <doctest.h>

#include <cmath>

#include "harnack/errors.hpp"
#include "harnack/gallery.hpp"
#include "harnack/svg.hpp"

using namespace harnack;

TEST_CASE("grid counts") {
  auto inst = build_grid(3, 3);
  CHECK(inst.graph->vertex_count() == 9);
  CHECK(inst.graph->edge_count() == 12);
  CHECK(inst.domain.interior().size() == 1);
  CHECK(inst.domain.boundary().size() == 4);  // corners dropped
  CHECK_THROWS_AS(build_grid(2, 5), Error);
}

TEST_CASE("path") {
  auto inst = build_path(4);
  CHECK(inst.domain.interior() == VertexSet{1, 2, 3});
  CHECK(inst.domain.boundary() == VertexSet{0, 4});
}

TEST_CASE("slit duplicates its inner vertices") {
  auto inst = build_slit_grid(8, 0.5);
  // ambient lattice is 17 x 17; slit points strictly inside [-1,0] are (-0.5,0)
  CHECK(inst.graph->vertex_count() == 17 * 17);
  CHECK(inst.domain.graph().vertex_count() == 17 * 17 - 4 + 1);  // frame corners dropped
  const VertexId tip = inst.landmark("tip");
  CHECK(inst.domain.on_boundary(tip));
  CHECK_FALSE(inst.domain.on_frame(tip));
  CHECK(inst.mesh == 0.5);
}

TEST_CASE("half plane") {
  auto inst = build_half_plane(10);
  const VertexId xi = inst.landmark("xi");
  CHECK(inst.domain.on_boundary(xi));
  CHECK(inst.domain.graph().coord(xi)[1] == 0.0);
  CHECK_FALSE(inst.domain.on_frame(xi));
  CHECK(inst.domain.delta(inst.domain.interior()[0]) >= 1.0);
}

TEST_CASE("alpha weights") {
  AlphaLatticeOptions o;
  o.N = 8;
  o.alpha = 3.0;
  o.sign = -1;
  auto inst = build_weighted_lattice_alpha(o);
  const auto& g = *inst.graph;
  const double p[] = {0.0, 0.0}, q[] = {1.0, 0.0};
  const VertexId a = inst.domain.project(inst.vertex_at(p)), b = inst.domain.project(inst.vertex_at(q));
  const auto e = g.find_edge(a, b);
  REQUIRE(e >= 0);
  // geometric mean of rho(0) = 1 and rho(1,0) = 2^-1.5
  CHECK(g.edge(e).w == doctest::Approx(std::sqrt(std::pow(2.0, -1.5))));
  CHECK(g.measure(b) == doctest::Approx(std::pow(2.0, -1.5)));
}

TEST_CASE("cable refinement keeps boundary and landmarks") {
  auto inst = build_half_plane(10);
  auto ref = cable_refine(inst, 2);
  CHECK(ref.mesh == 0.5);
  CHECK(ref.domain.boundary() == inst.domain.boundary());
  CHECK(ref.landmark("xi") == inst.landmark("xi"));
  CHECK(ref.domain.graph().edge_count() == 2 * inst.domain.graph().edge_count());
}

TEST_CASE("builds are deterministic") {
  std::map<std::string, double> p{{"N", 12}, {"h", 1.0}, {"cable_k", 2}};
  CHECK(gallery_to_json(build_gallery("slit_grid", p)) == gallery_to_json(build_gallery("slit_grid", p)));
  CHECK_THROWS_AS(build_gallery("slit_grid", {}), Error);
  CHECK_THROWS_AS(build_gallery("nope", {}), Error);
}

TEST_CASE("svg output") {
  auto inst = build_grid(6, 5);
  const auto& g = inst.domain.graph();
  VertexFunction f = VertexFunction::LinSpaced(g.vertex_count(), 0.0, 1.0);
  HeatmapOptions opt;
  opt.title = "a < b";
  opt.markers = {{inst.landmark("center"), "c"}};
  auto svg = heatmap_svg(g, f, opt);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("a &lt; b") != std::string::npos);

  std::vector<EdgeSpec> e{{0, 1, 1.0}};
  auto bare = build_graph(e);
  try {
    heatmap_svg(bare, VertexFunction::Ones(2), {});
    FAIL("expected MissingCoordinates");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::MissingCoordinates);
  }
  auto sc = scatter_svg({{"s", {1, 2, 4}, {3, 5, -1}}}, true, "t", "r", "C");
  CHECK(sc.find("polyline") != std::string::npos);
}
