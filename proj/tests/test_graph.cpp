#include <doctest.h>

#include <numeric>
#include <random>
#include <sstream>

#include "harnack/errors.hpp"
#include "harnack/graph.hpp"
#include "harnack/graph_io.hpp"
#include "harnack/potential.hpp"
#include "support.hpp"

using namespace harnack;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::IoError;
}

}  // namespace

TEST_CASE("build_graph rejects bad input") {
  std::vector<EdgeSpec> dup{{0, 1, 1.0}, {1, 0, 2.0}};
  CHECK(kind_of([&] { build_graph(dup); }) == ErrorKind::DuplicateEdge);
  std::vector<EdgeSpec> neg{{0, 1, -1.0}};
  CHECK(kind_of([&] { build_graph(neg); }) == ErrorKind::NonpositiveWeight);
  std::vector<EdgeSpec> split{{0, 1, 1.0}, {2, 3, 1.0}};
  CHECK(kind_of([&] { build_graph(split); }) == ErrorKind::DisconnectedGraph);
}

TEST_CASE("measure policies") {
  std::vector<EdgeSpec> e{{0, 1, 2.0}, {1, 2, 3.0}};
  auto deg = build_graph(e, MeasurePolicy::Degree);
  CHECK(deg.measure(1) == doctest::Approx(5.0));
  CHECK(deg.weight(0) == doctest::Approx(2.0));
  auto unit = build_graph(e, MeasurePolicy::Unit);
  CHECK(unit.measure(1) == 1.0);
  std::vector<double> mu{1, 2, 3};
  auto ex = build_graph(e, MeasurePolicy::Explicit, mu);
  CHECK(ex.measure(2) == 3.0);
}

TEST_CASE("laplacian kills constants and matches the energy") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 5; ++t) {
    auto g = testing::random_graph(rng, 40, 30);
    VertexFunction one = VertexFunction::Ones(40);
    CHECK(laplacian_apply(g, one).cwiseAbs().maxCoeff() < 1e-12);
    VertexFunction f = VertexFunction::Random(40);
    VertexFunction lf = laplacian_apply(g, f);
    double mlf = 0.0;
    for (VertexId x = 0; x < 40; ++x) mlf += f[x] * g.measure(x) * lf[x];
    CHECK(dirichlet_energy(g, f) == doctest::Approx(-mlf).epsilon(1e-10));
    VertexFunction h = VertexFunction::Random(40);
    CHECK(dirichlet_form(g, f, h) == doctest::Approx(dirichlet_form(g, h, f)));
  }
}

TEST_CASE("series subdivision keeps effective conductance") {
  std::mt19937_64 rng(11);
  auto g = testing::random_graph(rng, 25, 20);
  const VertexSet omega = [] {
    VertexSet s(24);
    std::iota(s.begin(), s.end(), VertexId{1});
    return s;
  }();
  // vertex 0 grounded, unit potential at vertex 1
  std::vector<VertexId> target{1};
  const double before = capacity(g, omega, target).capacity;
  for (int k : {2, 3}) {
    auto s = cable_subdivide_detailed(g, k);
    CHECK(s.graph.vertex_count() == 25 + (k - 1) * g.edge_count());
    CHECK(s.graph.edge_count() == k * g.edge_count());
    VertexSet big(s.graph.vertex_count() - 1);
    std::iota(big.begin(), big.end(), VertexId{1});
    CHECK(capacity(s.graph, big, target).capacity == doctest::Approx(before).epsilon(1e-9));
    for (const auto& e : s.graph.edges()) CHECK(e.length == doctest::Approx(1.0 / k));
  }
}

TEST_CASE("controlled weights on a path") {
  std::vector<EdgeSpec> e{{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}};
  CHECK(controlled_weights_constant(build_graph(e)) == doctest::Approx(0.5));
  std::vector<EdgeSpec> skew{{0, 1, 1.0}, {1, 2, 3.0}};
  CHECK(controlled_weights_constant(build_graph(skew)) == doctest::Approx(0.25));
}

TEST_CASE("rescale and relabel") {
  std::mt19937_64 rng(5);
  auto g = testing::random_graph(rng, 12, 6);
  auto s = rescale(g, 3.0, 0.5);
  CHECK(s.edge(0).w == doctest::Approx(3.0 * g.edge(0).w));
  CHECK(s.measure(4) == doctest::Approx(0.5 * g.measure(4)));
  CHECK_THROWS_AS(rescale(g, 0.0, 1.0), Error);

  std::vector<VertexId> perm(12);
  std::iota(perm.begin(), perm.end(), VertexId{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  auto r = relabel(g, perm);
  for (VertexId v = 0; v < 12; ++v) {
    CHECK(r.measure(perm[v]) == g.measure(v));
    CHECK(r.weight(perm[v]) == doctest::Approx(g.weight(v)));
  }
}

TEST_CASE("balls and vertex boundary on a path") {
  std::vector<EdgeSpec> e;
  for (VertexId i = 0; i < 6; ++i) e.push_back({i, i + 1, 1.0});
  auto g = build_graph(e);
  CHECK(open_ball(g, 3, 2.0) == VertexSet{2, 3, 4});
  CHECK(closed_ball(g, 3, 2.0) == VertexSet{1, 2, 3, 4, 5});
  std::vector<VertexId> mid{2, 3, 4};
  CHECK(vertex_boundary(g, mid) == VertexSet{1, 5});
  auto sp = shortest_paths(g, std::vector<VertexId>{0});
  CHECK(sp.distance[6] == 6.0);
  CHECK(extract_path(sp, 3) == std::vector<VertexId>{0, 1, 2, 3});
  std::vector<VertexId> split{0, 1, 4, 5};
  CHECK(components(g, split).size() == 2);
  CHECK_FALSE(is_connected_subset(g, split));
}

TEST_CASE("text and json round trips") {
  std::mt19937_64 rng(9);
  auto g = testing::random_graph(rng, 30, 15);
  std::istringstream in(write_graph_text(g));
  auto t = read_graph_text(in);
  REQUIRE(t.edge_count() == g.edge_count());
  auto j = read_graph_json(write_graph_json(g));
  for (std::uint32_t k = 0; k < g.edge_count(); ++k) {
    CHECK(j.edge(k).w == g.edge(k).w);
    CHECK(t.edge(k).w == doctest::Approx(g.edge(k).w).epsilon(1e-15));
  }
  for (VertexId v = 0; v < 30; ++v) CHECK(j.measure(v) == g.measure(v));
  CHECK(write_graph_json(j) == write_graph_json(g));
}
