#include "harnack/domain.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <mutex>
#include <random>
#include <unordered_map>

#include <json.hpp>

#include "harnack/errors.hpp"
#include "search.hpp"

namespace harnack {

namespace {

constexpr double kEps = 1e-9;
constexpr std::size_t kCacheLimit = 4096;

}  // namespace

struct DomainView::Cache {
  std::mutex mutex;
  std::unordered_map<VertexId, std::shared_ptr<const std::vector<double>>> tables;
  std::once_flag delta_once;
  std::vector<double> delta;
};

DomainView::DomainView(std::shared_ptr<const WeightedGraph> closure, VertexSet interior, VertexSet boundary)
    : graph_(std::move(closure)),
      interior_(make_set(std::move(interior))),
      boundary_(make_set(std::move(boundary))),
      cache_(std::make_shared<Cache>()) {
  if (!graph_) fail(ErrorKind::InvalidArgument, "domain needs a closure graph");
  const std::size_t n = graph_->vertex_count();
  if (interior_.empty()) fail(ErrorKind::EmptyInterior, "domain interior is empty");
  if ((!interior_.empty() && interior_.back() >= n) || (!boundary_.empty() && boundary_.back() >= n))
    fail(ErrorKind::InvalidArgument, "domain vertex out of range");
  mask_ = membership(n, interior_);
  for (VertexId b : boundary_)
    if (mask_[b]) fail(ErrorKind::OverlappingSets, "vertex " + std::to_string(b) + " is both interior and boundary");
  if (interior_.size() + boundary_.size() != n)
    fail(ErrorKind::InvalidArgument, "interior and boundary must cover the closure graph");
  for (VertexId b : boundary_) {
    bool ok = false;
    for (const auto& nb : graph_->neighbors(b)) ok = ok || mask_[nb.v];
    if (!ok) fail(ErrorKind::IsolatedBoundaryVertex, "boundary vertex " + std::to_string(b) + " has no interior neighbour");
  }
  if (!is_connected_subset(*graph_, interior_)) fail(ErrorKind::DisconnectedInterior, "domain interior is disconnected");
}

bool DomainView::on_frame(VertexId v) const noexcept { return std::binary_search(frame_.begin(), frame_.end(), v); }

void DomainView::set_frame(VertexSet frame) {
  frame = make_set(std::move(frame));
  for (VertexId v : frame)
    if (!on_boundary(v)) fail(ErrorKind::InvalidArgument, "frame vertices must be boundary vertices");
  frame_ = std::move(frame);
}

void DomainView::set_ambient(std::shared_ptr<const WeightedGraph> ambient, std::vector<VertexId> projection) {
  if (!ambient || projection.size() != graph_->vertex_count())
    fail(ErrorKind::InvalidArgument, "projection must cover every closure vertex");
  for (VertexId v : projection)
    if (v >= ambient->vertex_count()) fail(ErrorKind::InvalidArgument, "projection leaves the ambient graph");
  ambient_ = std::move(ambient);
  projection_ = std::move(projection);
}

const WeightedGraph& DomainView::ambient() const {
  if (!ambient_) fail(ErrorKind::InvalidArgument, "no ambient graph attached");
  return *ambient_;
}

VertexId DomainView::project(VertexId v) const {
  if (!ambient_) fail(ErrorKind::InvalidArgument, "no ambient graph attached");
  return projection_.at(v);
}

std::shared_ptr<const std::vector<double>> DomainView::distances_from(VertexId source) const {
  if (source >= graph_->vertex_count()) fail(ErrorKind::InvalidArgument, "source out of range");
  {
    std::lock_guard lock(cache_->mutex);
    if (auto it = cache_->tables.find(source); it != cache_->tables.end()) return it->second;
  }
  const VertexId src[] = {source};
  auto table = std::make_shared<const std::vector<double>>(shortest_distances(*graph_, src, mask_));
  std::lock_guard lock(cache_->mutex);
  if (cache_->tables.size() >= kCacheLimit) cache_->tables.clear();
  return cache_->tables.emplace(source, std::move(table)).first->second;
}

double DomainView::distance(VertexId x, VertexId y) const {
  const double d = (*distances_from(x))[y];
  if (!std::isfinite(d)) fail(ErrorKind::Unreachable, "no path inside the domain");
  return d;
}

std::span<const double> DomainView::delta() const {
  std::call_once(cache_->delta_once, [&] {
    cache_->delta = boundary_.empty() ? std::vector<double>(graph_->vertex_count(), kInfinity)
                                      : shortest_distances(*graph_, boundary_, mask_);
  });
  return cache_->delta;
}

VertexSet DomainView::inner_ball(VertexId center, double r) const {
  const auto d = distances_from(center);
  VertexSet out;
  for (VertexId v : interior_)
    if ((*d)[v] < r - kEps) out.push_back(v);
  return out;
}

VertexSet DomainView::inner_closed_ball(VertexId center, double r) const {
  const auto d = distances_from(center);
  VertexSet out;
  for (VertexId v : interior_)
    if ((*d)[v] <= r + kEps) out.push_back(v);
  return out;
}

VertexSet DomainView::inner_shell(VertexId center, double s, double width) const {
  const auto d = distances_from(center);
  VertexSet out;
  for (VertexId v : interior_)
    if ((*d)[v] >= s - kEps && (*d)[v] < s + width - kEps) out.push_back(v);
  return out;
}

DomainView domain_view(std::shared_ptr<const WeightedGraph> closure, VertexSet interior, VertexSet boundary) {
  return DomainView(std::move(closure), std::move(interior), std::move(boundary));
}

DomainView domain_view(const WeightedGraph& closure, VertexSet interior, VertexSet boundary) {
  return DomainView(std::make_shared<const WeightedGraph>(closure), std::move(interior), std::move(boundary));
}

double intrinsic_distance(const DomainView& dv, VertexId x, VertexId y) { return dv.distance(x, y); }

VertexSet inner_ball(const DomainView& dv, VertexId center, double r) { return dv.inner_ball(center, r); }

bool touches_frame(const DomainView& dv, VertexId center, double r) {
  if (dv.frame().empty()) return false;
  const auto d = dv.distances_from(center);
  for (VertexId f : dv.frame())
    if ((*d)[f] <= r + kEps) return true;
  return false;
}

// --- inner uniformity -------------------------------------------------------

std::vector<std::pair<VertexId, VertexId>> sample_pairs(const DomainView& dv, const PairSampling& sampling) {
  const auto& u = dv.interior();
  std::vector<std::pair<VertexId, VertexId>> pairs;
  const bool exhaustive = sampling.policy == PairPolicy::Exhaustive ||
                          (sampling.policy == PairPolicy::Auto && u.size() <= sampling.exhaustive_limit);
  if (exhaustive) {
    pairs.reserve(u.size() * (u.size() - 1) / 2);
    for (std::size_t i = 0; i < u.size(); ++i)
      for (std::size_t j = i + 1; j < u.size(); ++j) pairs.emplace_back(u[i], u[j]);
    return pairs;
  }
  std::mt19937_64 rng(sampling.seed);
  auto pick = [&](const VertexSet& from) {
    std::uniform_int_distribution<std::size_t> dist(0, from.size() - 1);
    VertexId a = from[dist(rng)], b = from[dist(rng)];
    while (b == a && from.size() > 1) b = from[dist(rng)];
    return std::pair{std::min(a, b), std::max(a, b)};
  };
  for (std::size_t k = 0; k < sampling.random_pairs && u.size() > 1; ++k) pairs.push_back(pick(u));

  VertexSet near;
  const auto delta = dv.delta();
  for (VertexId v : u)
    if (delta[v] <= dv.mesh() + kEps) near.push_back(v);
  if (near.size() > 1) {
    const std::size_t all = near.size() * (near.size() - 1) / 2;
    if (all <= sampling.boundary_pairs) {
      for (std::size_t i = 0; i < near.size(); ++i)
        for (std::size_t j = i + 1; j < near.size(); ++j) pairs.emplace_back(near[i], near[j]);
    } else {
      for (std::size_t k = 0; k < sampling.boundary_pairs; ++k) pairs.push_back(pick(near));
    }
  }
  return pairs;
}

namespace {

bool is_exhaustive(const DomainView& dv, const PairSampling& s) {
  return s.policy == PairPolicy::Exhaustive ||
         (s.policy == PairPolicy::Auto && dv.interior().size() <= s.exhaustive_limit);
}

/// Constrained search from x to y; returns the length (inf when y is not
/// reached within `bound`) and leaves the path in `search`.
double constrained_length(const DomainView& dv, detail::Search& search, VertexId x, VertexId y, double c,
                          const std::vector<double>& dx, const std::vector<double>& dy, double bound) {
  const auto delta = dv.delta();
  const auto mask = dv.interior_mask();
  auto admissible = [&](VertexId z) {
    if (z == y) return true;
    return mask[z] && delta[z] >= c * std::min(dx[z], dy[z]) - kEps;
  };
  const VertexId src[] = {x};
  search.run(dv.graph(), src, admissible, bound, y);
  return search.distance(y);
}

}  // namespace

std::vector<char> admissible_set(const DomainView& dv, VertexId x, VertexId y, double c) {
  const auto dx = dv.distances_from(x);
  const auto dy = dv.distances_from(y);
  const auto delta = dv.delta();
  std::vector<char> a(dv.graph().vertex_count(), 0);
  for (VertexId z : dv.interior()) a[z] = delta[z] >= c * std::min((*dx)[z], (*dy)[z]) - kEps;
  a[x] = a[y] = 1;
  return a;
}

std::vector<VertexId> inner_uniform_path(const DomainView& dv, VertexId x, VertexId y, double c) {
  if (!dv.in_interior(x) || !dv.in_interior(y)) fail(ErrorKind::InvalidArgument, "curve endpoints must be interior");
  if (x == y) return {x};
  detail::Search search(dv.graph().vertex_count());
  const auto dx = dv.distances_from(x);
  const auto dy = dv.distances_from(y);
  constrained_length(dv, search, x, y, c, *dx, *dy, kInfinity);
  return search.path_to(y);
}

double path_length(const WeightedGraph& g, std::span<const VertexId> path) {
  double s = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const auto e = g.find_edge(path[i - 1], path[i]);
    if (e < 0) fail(ErrorKind::InvalidArgument, "path uses a non-edge");
    s += g.edge(static_cast<std::uint32_t>(e)).length;
  }
  return s;
}

InnerUniformCertificate inner_uniformity_check(const DomainView& dv, double c, double C,
                                               const PairSampling& sampling) {
  if (!(c > 0.0 && c <= 1.0) || !(C >= 1.0)) fail(ErrorKind::InvalidArgument, "need 0 < c <= 1 and C >= 1");
  const bool exhaustive = is_exhaustive(dv, sampling);
  const auto pairs = sample_pairs(dv, sampling);
  detail::Search search(dv.graph().vertex_count());

  InnerUniformCertificate cert;
  cert.c = c;
  cert.C = C;
  PairRecord worst;
  bool have_worst = false;
  for (auto [x, y] : pairs) {
    ++cert.pairs_checked;
    PairRecord rec{x, y, 0.0, 0.0, true, {}};
    if (x != y) {
      const auto dx = dv.distances_from(x);
      const auto dy = dv.distances_from(y);
      rec.distance = (*dx)[y];
      rec.length = constrained_length(dv, search, x, y, c, *dx, *dy, C * rec.distance + kEps);
      rec.accepted = std::isfinite(rec.length);
    }
    if (!rec.accepted) {
      ++cert.failures;
      rec.path = inner_uniform_path(dv, x, y, c);
      if (!rec.path.empty()) rec.length = path_length(dv.graph(), rec.path);
      cert.pairs.push_back(std::move(rec));
      continue;
    }
    const double ratio = x == y ? 1.0 : rec.length / rec.distance;
    if (ratio > cert.worst_ratio || !have_worst) {
      cert.worst_ratio = std::max(cert.worst_ratio, ratio);
      if (x != y) rec.path = search.path_to(y);
      worst = rec;
      have_worst = true;
    }
    if (!exhaustive) {
      rec.path.clear();
      cert.pairs.push_back(std::move(rec));
    }
  }
  if (have_worst) {
    if (exhaustive) {
      cert.pairs.push_back(std::move(worst));
    } else {
      for (auto& p : cert.pairs)
        if (p.x == worst.x && p.y == worst.y && p.accepted) {
          p.path = worst.path;
          break;
        }
    }
  }
  if (cert.failures > 0)
    cert.status = CertificateStatus::Refuted;
  else
    cert.status = exhaustive ? CertificateStatus::Certified : CertificateStatus::SampledOnly;
  return cert;
}

UniformityEstimate estimate_inner_uniformity_constants(const DomainView& dv, const PairSampling& sampling,
                                                       double ratio_cap) {
  const auto pairs = sample_pairs(dv, sampling);
  detail::Search search(dv.graph().vertex_count());
  UniformityEstimate est;
  est.C = kInfinity;
  for (int k = 0; k <= 6; ++k) {
    const double c = std::ldexp(1.0, -k);
    double worst = 1.0;
    for (auto [x, y] : pairs) {
      if (x == y) continue;
      const auto dx = dv.distances_from(x);
      const auto dy = dv.distances_from(y);
      const double d = (*dx)[y];
      const double len = constrained_length(dv, search, x, y, c, *dx, *dy, ratio_cap * d + kEps);
      worst = std::max(worst, len / d);
      if (!std::isfinite(worst)) break;
    }
    est.table.emplace_back(c, worst);
    if (worst < est.C - 1e-12) {
      est.C = worst;
      est.c = c;
    }
  }
  if (!std::isfinite(est.C)) fail(ErrorKind::Infeasible, "no c on the grid admits a finite C");
  return est;
}

// --- far points and chains ----------------------------------------------------

VertexId far_point_at(const DomainView& dv, VertexId xi, double distance, double clearance) {
  const double h = dv.mesh();
  if (distance < h) fail(ErrorKind::NoFarPoint, "scale is below the mesh resolution");
  const auto d = dv.distances_from(xi);
  const auto delta = dv.delta();
  // the shell [distance, distance + h) first, then the +-h window
  for (int pass = 0; pass < 2; ++pass) {
    VertexId best = 0;
    double best_delta = -1.0;
    for (VertexId v : dv.interior()) {
      const double dist = (*d)[v];
      const bool in = pass == 0 ? (dist >= distance - kEps && dist < distance + h - kEps)
                                : std::abs(dist - distance) <= h + kEps;
      if (!in || delta[v] < clearance - h - kEps) continue;
      if (delta[v] > best_delta) {
        best_delta = delta[v];
        best = v;
      }
    }
    if (best_delta >= 0.0) return best;
  }
  fail(ErrorKind::NoFarPoint, "no vertex with the required clearance at this distance");
}

VertexId far_point(const DomainView& dv, VertexId xi, double r, double c_U) {
  return far_point_at(dv, xi, r / 4.0, c_U * r / 4.0);
}

std::vector<double> dyadic_radii(double r_max, int levels) {
  std::vector<double> out;
  for (int j = 0; j < levels; ++j) out.push_back(std::ldexp(r_max, -j));
  return out;
}

HarnackChain harnack_chain_length(const DomainView& dv, VertexId x, VertexId y, double M,
                                  std::span<const double> radius_grid) {
  if (!dv.in_interior(x) || !dv.in_interior(y)) fail(ErrorKind::InvalidArgument, "chain endpoints must be interior");
  if (!(M > 1.0)) fail(ErrorKind::InvalidArgument, "chain needs M > 1");
  if (radius_grid.empty()) fail(ErrorKind::InvalidArgument, "radius grid is empty");

  const auto& g = dv.graph();
  const auto delta = dv.delta();
  const auto mask = dv.interior_mask();
  std::vector<ChainBall> nodes;
  std::vector<std::size_t> core_offset{0};
  std::vector<VertexId> core;
  detail::Search search(g.vertex_count());
  auto interior_only = [&](VertexId v) { return mask[v] != 0; };

  std::vector<double> grid(radius_grid.begin(), radius_grid.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  for (double r : grid) {
    if (!(r > 0.0)) fail(ErrorKind::InvalidArgument, "radii must be positive");
    for (VertexId c : dv.interior()) {
      if (delta[c] < r - kEps) continue;
      const VertexId src[] = {c};
      search.run(g, src, interior_only, r / M + kEps);
      nodes.push_back({c, r});
      for (VertexId v : search.touched())
        if (mask[v] && search.distance(v) <= r / M + kEps) core.push_back(v);
      core_offset.push_back(core.size());
    }
  }

  const std::size_t n_nodes = nodes.size();
  std::vector<std::vector<std::uint32_t>> index(g.vertex_count());
  for (std::size_t k = 0; k < n_nodes; ++k)
    for (std::size_t i = core_offset[k]; i < core_offset[k + 1]; ++i)
      index[core[i]].push_back(static_cast<std::uint32_t>(k));
  if (index[x].empty() || index[y].empty()) fail(ErrorKind::NoChain, "radius grid has no ball whose core covers an endpoint");

  std::vector<char> is_target(n_nodes, 0);
  for (auto k : index[y]) is_target[k] = 1;
  constexpr auto kUnset = static_cast<std::uint32_t>(-1);
  std::vector<std::uint32_t> parent(n_nodes, kUnset);
  std::vector<char> seen(n_nodes, 0), vertex_done(g.vertex_count(), 0);
  std::deque<std::uint32_t> queue;
  for (auto k : index[x]) {
    seen[k] = 1;
    queue.push_back(k);
  }
  std::int64_t hit = -1;
  while (!queue.empty()) {
    const auto k = queue.front();
    queue.pop_front();
    if (is_target[k]) {
      hit = k;
      break;
    }
    for (std::size_t i = core_offset[k]; i < core_offset[k + 1]; ++i) {
      const VertexId v = core[i];
      if (vertex_done[v]) continue;
      vertex_done[v] = 1;
      for (auto m : index[v])
        if (!seen[m]) {
          seen[m] = 1;
          parent[m] = k;
          queue.push_back(m);
        }
    }
  }
  if (hit < 0) fail(ErrorKind::NoChain, "no chain of admissible balls links the points");

  HarnackChain chain;
  for (auto k = static_cast<std::uint32_t>(hit); k != kUnset; k = parent[k]) chain.balls.push_back(nodes[k]);
  std::reverse(chain.balls.begin(), chain.balls.end());
  chain.length = chain.balls.size();
  return chain;
}

// --- serialization ------------------------------------------------------------

std::string domain_to_json(const DomainView& dv, const std::string& graph_ref) {
  nlohmann::json j;
  j["graph_ref"] = graph_ref;
  j["interior"] = dv.interior();
  j["boundary"] = dv.boundary();
  std::vector<double> lengths;
  for (const auto& e : dv.graph().edges()) lengths.push_back(e.length);
  j["edge_length"] = lengths;
  if (!dv.frame().empty()) j["frame"] = dv.frame();
  return j.dump();
}

std::string certificate_to_json(const InnerUniformCertificate& cert) {
  nlohmann::json j;
  j["c"] = cert.c;
  j["C"] = cert.C;
  j["status"] = cert.status == CertificateStatus::Certified ? "certified"
                : cert.status == CertificateStatus::Refuted ? "refuted"
                                                             : "sampled-only";
  j["pairs_checked"] = cert.pairs_checked;
  j["failures"] = cert.failures;
  j["worst_ratio"] = cert.worst_ratio;
  auto& arr = j["pairs"] = nlohmann::json::array();
  for (const auto& p : cert.pairs) {
    nlohmann::json e{{"x", p.x}, {"y", p.y}, {"distance", p.distance}, {"accepted", p.accepted}};
    e["length"] = std::isfinite(p.length) ? nlohmann::json(p.length) : nlohmann::json(nullptr);
    if (!p.path.empty()) e["path"] = p.path;
    arr.push_back(std::move(e));
  }
  return j.dump();
}

std::string chain_to_json(const HarnackChain& chain) {
  nlohmann::json j;
  j["length"] = chain.length;
  auto& arr = j["balls"] = nlohmann::json::array();
  for (const auto& b : chain.balls) arr.push_back({{"center", b.center}, {"radius", b.radius}});
  return j.dump();
}

}  // namespace harnack
