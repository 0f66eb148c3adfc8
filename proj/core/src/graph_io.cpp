#include "harnack/graph_io.hpp"

#include <istream>
#include <sstream>

#include <json.hpp>

#include "harnack/errors.hpp"

namespace harnack {

std::string write_graph_text(const WeightedGraph& g, bool include_measure) {
  std::ostringstream out;
  out.precision(17);
  out << g.vertex_count() << ' ' << g.edge_count() << '\n';
  for (const auto& e : g.edges()) out << e.x << ' ' << e.y << ' ' << e.w << '\n';
  if (include_measure)
    for (double m : g.measure()) out << m << '\n';
  return out.str();
}

WeightedGraph read_graph_text(std::istream& in) {
  std::size_t n = 0, m = 0;
  if (!(in >> n >> m)) fail(ErrorKind::ConfigParse, "graph text: missing `n m` header");
  std::vector<Edge> edges(m);
  for (auto& e : edges) {
    if (!(in >> e.x >> e.y >> e.w)) fail(ErrorKind::ConfigParse, "graph text: truncated edge list");
  }
  std::vector<double> mu;
  double v;
  while (mu.size() < n && in >> v) mu.push_back(v);
  if (mu.empty()) {
    mu.assign(n, 0.0);
    for (const auto& e : edges) {
      if (e.x < n) mu[e.x] += e.w;
      if (e.y < n) mu[e.y] += e.w;
    }
  } else if (mu.size() != n) {
    fail(ErrorKind::ConfigParse, "graph text: measure section must list all n vertices");
  }
  return WeightedGraph(n, std::move(edges), std::move(mu));
}

std::string write_graph_json(const WeightedGraph& g) {
  nlohmann::json j;
  j["vertices"] = g.vertex_count();
  auto edges = nlohmann::json::array();
  bool unit_lengths = true;
  for (const auto& e : g.edges()) {
    edges.push_back({e.x, e.y, e.w});
    unit_lengths = unit_lengths && e.length == 1.0;
  }
  j["edges"] = std::move(edges);
  j["measure"] = std::vector<double>(g.measure().begin(), g.measure().end());
  if (!unit_lengths) {
    std::vector<double> lengths;
    for (const auto& e : g.edges()) lengths.push_back(e.length);
    j["lengths"] = lengths;
  }
  if (g.has_coords()) {
    j["coord_dim"] = g.coord_dim();
    j["coords"] = std::vector<double>(g.coords().begin(), g.coords().end());
  }
  return j.dump();
}

WeightedGraph read_graph_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorKind::ConfigParse, std::string("graph json: ") + ex.what());
  }
  try {
    const std::size_t n = j.at("vertices").get<std::size_t>();
    std::vector<Edge> edges;
    for (const auto& row : j.at("edges")) {
      if (row.size() != 3) fail(ErrorKind::ConfigParse, "graph json: edges must be [x,y,w] triples");
      edges.push_back({row[0].get<VertexId>(), row[1].get<VertexId>(), row[2].get<double>(), 1.0});
    }
    if (j.contains("lengths")) {
      const auto& lengths = j["lengths"];
      if (lengths.size() != edges.size()) fail(ErrorKind::ConfigParse, "graph json: lengths/edges mismatch");
      for (std::size_t i = 0; i < edges.size(); ++i) edges[i].length = lengths[i].get<double>();
    }
    std::vector<double> mu;
    if (j.contains("measure")) {
      mu = j["measure"].get<std::vector<double>>();
    } else {
      mu.assign(n, 0.0);
      for (const auto& e : edges) {
        if (e.x < n) mu[e.x] += e.w;
        if (e.y < n) mu[e.y] += e.w;
      }
    }
    std::vector<double> coords;
    std::size_t dim = 0;
    if (j.contains("coords")) {
      coords = j["coords"].get<std::vector<double>>();
      dim = j.at("coord_dim").get<std::size_t>();
    }
    return WeightedGraph(n, std::move(edges), std::move(mu), std::move(coords), dim);
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorKind::ConfigParse, std::string("graph json: ") + ex.what());
  }
}

}  // namespace harnack
