#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "harnack/graph.hpp"

namespace harnack::testing {

/// Random connected graph: a random recursive tree plus `extra` chords,
/// conductances in [0.2, 5], measure in [0.5, 2].
inline WeightedGraph random_graph(std::mt19937_64& rng, std::size_t n, std::size_t extra) {
  std::uniform_real_distribution<double> wd(0.2, 5.0), md(0.5, 2.0);
  std::vector<EdgeSpec> edges;
  std::vector<std::vector<char>> seen(n, std::vector<char>(n, 0));
  for (std::size_t v = 1; v < n; ++v) {
    const auto u = std::uniform_int_distribution<std::size_t>(0, v - 1)(rng);
    edges.push_back({static_cast<VertexId>(u), static_cast<VertexId>(v), wd(rng)});
    seen[u][v] = seen[v][u] = 1;
  }
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t k = 0, tries = 0; k < extra && tries < 20 * extra; ++tries) {
    const auto a = pick(rng), b = pick(rng);
    if (a == b || seen[a][b]) continue;
    seen[a][b] = seen[b][a] = 1;
    edges.push_back({static_cast<VertexId>(std::min(a, b)), static_cast<VertexId>(std::max(a, b)), wd(rng)});
    ++k;
  }
  std::vector<double> mu(n);
  for (auto& m : mu) m = md(rng);
  return build_graph(edges, MeasurePolicy::Explicit, mu);
}

/// Connected proper subset grown from a random seed vertex.
inline VertexSet random_domain(std::mt19937_64& rng, const WeightedGraph& g, std::size_t target) {
  const std::size_t n = g.vertex_count();
  target = std::clamp<std::size_t>(target, 1, n - 1);
  std::vector<char> in(n, 0);
  VertexSet out{static_cast<VertexId>(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng))};
  in[out[0]] = 1;
  while (out.size() < target) {
    std::vector<VertexId> frontier;
    for (VertexId v : out)
      for (const auto& nb : g.neighbors(v))
        if (!in[nb.v]) frontier.push_back(nb.v);
    if (frontier.empty()) break;
    const VertexId v = frontier[std::uniform_int_distribution<std::size_t>(0, frontier.size() - 1)(rng)];
    if (in[v]) continue;
    in[v] = 1;
    out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Dense conductance Laplacian restricted to omega, built from the edge list.
inline Eigen::MatrixXd dense_dirichlet_matrix(const WeightedGraph& g, const VertexSet& omega) {
  std::vector<int> at(g.vertex_count(), -1);
  for (std::size_t i = 0; i < omega.size(); ++i) at[omega[i]] = static_cast<int>(i);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(omega.size(), omega.size());
  for (const auto& e : g.edges()) {
    const int i = at[e.x], j = at[e.y];
    if (i >= 0) a(i, i) += e.w;
    if (j >= 0) a(j, j) += e.w;
    if (i >= 0 && j >= 0) a(i, j) -= e.w, a(j, i) -= e.w;
  }
  return a;
}

}  // namespace harnack::testing
