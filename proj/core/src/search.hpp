#pragma once

// Reusable Dijkstra state for many small searches on one graph: only touched
// entries are reset between runs.

#include <functional>
#include <queue>
#include <vector>

#include "harnack/graph.hpp"

namespace harnack::detail {

class Search {
 public:
  static constexpr VertexId kNone = static_cast<VertexId>(-1);

  explicit Search(std::size_t n) : dist_(n, kInfinity), parent_(n, kNone) {}

  /// Searches out of `sources`; a popped vertex other than a source expands
  /// only when expand(v) is true. Labels above `bound` are dropped. Stops as
  /// soon as `stop` is popped.
  template <class Expand>
  void run(const WeightedGraph& g, std::span<const VertexId> sources, Expand&& expand, double bound = kInfinity,
           VertexId stop = kNone) {
    reset();
    for (VertexId s : sources) {
      touch(s);
      dist_[s] = 0.0;
      heap_.push({0.0, s});
    }
    while (!heap_.empty()) {
      auto [d, x] = heap_.top();
      heap_.pop();
      if (d > dist_[x]) continue;
      if (x == stop) break;
      if (d > 0.0 && !expand(x)) continue;
      for (const auto& nb : g.neighbors(x)) {
        const double nd = d + g.edge(nb.edge).length;
        if (nd < dist_[nb.v] && nd <= bound) {
          touch(nb.v);
          dist_[nb.v] = nd;
          parent_[nb.v] = x;
          heap_.push({nd, nb.v});
        }
      }
    }
    heap_ = {};
  }

  double distance(VertexId v) const { return dist_[v]; }
  const std::vector<VertexId>& touched() const { return touched_; }

  std::vector<VertexId> path_to(VertexId target) const {
    std::vector<VertexId> path;
    if (dist_[target] == kInfinity) return path;
    for (VertexId v = target; v != kNone; v = parent_[v]) path.push_back(v);
    return {path.rbegin(), path.rend()};
  }

 private:
  void touch(VertexId v) {
    if (dist_[v] == kInfinity && parent_[v] == kNone) touched_.push_back(v);
  }
  void reset() {
    for (VertexId v : touched_) {
      dist_[v] = kInfinity;
      parent_[v] = kNone;
    }
    touched_.clear();
  }

  using Item = std::pair<double, VertexId>;
  std::vector<double> dist_;
  std::vector<VertexId> parent_;
  std::vector<VertexId> touched_;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap_;
};

}  // namespace harnack::detail
