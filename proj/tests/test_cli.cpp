#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "harnack/errors.hpp"
#include "harnack/graph_io.hpp"
#include "lab.hpp"

namespace fs = std::filesystem;
using namespace harnack;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::path(HARNACK_TEST_SCRATCH) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p;
}

const fs::path kConfigs = fs::path(HARNACK_SOURCE_DIR) / "tools" / "configs";

}  // namespace

TEST_CASE("bundled slit config passes and reruns byte for byte") {
  auto a = scratch("slit-a"), b = scratch("slit-b");
  auto ra = lab::run_config(kConfigs / "slit_bhp.json", {a, 1});
  CHECK(ra.exit_code == 0);
  CHECK(ra.failed == 0);
  CHECK(ra.rejected == 0);
  auto rb = lab::run_config(kConfigs / "slit_bhp.json", {b, 2});
  CHECK(rb.exit_code == 0);

  std::size_t csvs = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().extension() != ".csv") continue;
    ++csvs;
    CHECK_MESSAGE(slurp(e.path()) == slurp(b / e.path().filename()), e.path().filename().string());
  }
  CHECK(csvs >= 5);
  const auto report = slurp(ra.report);
  CHECK(report.find("\"C1\"") != std::string::npos);

  auto files = lab::plot_report(ra.report, "green-heatmap");
  REQUIRE(files.size() == 1);
  const auto svg = slurp(files[0]);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("<line") != std::string::npos);  // the slit
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(lab::plot_report(ra.report, "constants-vs-scale").size() == 1);
  CHECK_THROWS_AS(lab::plot_report(ra.report, "pie-chart"), Error);
}

TEST_CASE("r below the mesh is a rejection") {
  auto dir = scratch("reject");
  auto cfg = write(dir / "c.json", R"({
    "schema": "harnack-lab/1",
    "instances": {"slit": {"builder": "slit_grid", "params": {"N": 20, "h": 1}}},
    "tasks": [{"name": "tiny", "kind": "bhp", "instance": "slit", "boundary": "tip", "radii": [0.5]}]
  })");
  auto r = lab::run_config(cfg, {dir / "out", 1});
  CHECK(r.exit_code == 2);
  CHECK(r.rejected == 1);
  CHECK(slurp(r.report).find("ConfigRejected") != std::string::npos);
}

TEST_CASE("a failing assertion exits 1") {
  auto dir = scratch("fail");
  auto cfg = write(dir / "c.json", R"({
    "schema": "harnack-lab/1",
    "instances": {"g": {"builder": "grid", "params": {"nx": 33, "ny": 33}}},
    "tasks": [{"name": "ehi", "kind": "ehi-scan", "instance": "g", "centers": ["center"], "radii": [4, 8],
               "delta": 0.5, "assert": {"min_sup": 1e6}},
              {"name": "ok", "kind": "ehi-scan", "instance": "g", "centers": ["center"], "radii": [4],
               "delta": 0.5}]
  })");
  auto r = lab::run_config(cfg, {dir / "out", 2});
  CHECK(r.exit_code == 1);
  CHECK(r.failed == 1);
  CHECK(r.passed == 1);
}

TEST_CASE("config errors") {
  auto dir = scratch("parse");
  CHECK_THROWS_AS(lab::run_config(write(dir / "bad.json", "{ not json"), {dir, 1}), Error);
  try {
    lab::run_config(write(dir / "v.json", R"({"schema": "harnack-lab/9", "tasks": []})"), {dir, 1});
    FAIL("schema accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigParse);
    CHECK(lab::exit_code_for(e) == 1);
  }
  CHECK(lab::exit_code_for(Error(ErrorKind::EmptySphere, "x")) == 2);
  CHECK(lab::exit_code_for(Error(ErrorKind::SolverDivergence, "x")) == 1);
}

TEST_CASE("heatmap of a graph without coordinates") {
  auto dir = scratch("nocoords");
  std::vector<EdgeSpec> e;
  for (VertexId i = 0; i < 40; ++i) e.push_back({i, i + 1, 1.0});
  const auto g = build_graph(e);
  std::string interior;
  for (int i = 1; i < 40; ++i) interior += (i > 1 ? "," : "") + std::to_string(i);
  write(dir / "line.json", "{\"graph\": " + write_graph_json(g) + ", \"domain\": {\"interior\": [" + interior +
                               "], \"boundary\": [0, 40]}, \"landmarks\": {\"center\": 20}}");
  auto cfg = write(dir / "c.json", R"({
    "schema": "harnack-lab/1",
    "tasks": [{"name": "line", "kind": "ehi-scan", "instance": {"file": "line.json"}, "centers": ["center"],
               "radii": [4, 8], "delta": 0.5}]
  })");
  auto r = lab::run_config(cfg, {dir / "out", 1});
  CHECK(r.exit_code == 0);
  try {
    lab::plot_report(r.report, "kernel-heatmap");
    FAIL("plot without coordinates");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::MissingCoordinates);
  }
}

TEST_CASE("gallery emit") {
  const auto a = lab::emit_gallery("grid", {{"nx", 3}, {"ny", 3}});
  CHECK(a == lab::emit_gallery("grid", {{"nx", 3}, {"ny", 3}}));
  CHECK(a.find("\"builder\"") != std::string::npos);
}
