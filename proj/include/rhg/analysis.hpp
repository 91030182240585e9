#pragma once

// Structural statistics of a built graph: components, diameters, the center
// clique, hop distance to it, induced-path components and degree tails.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <vector>

#include "error.hpp"
#include "graph.hpp"
#include "measure.hpp"

namespace rhg {

inline constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

/// Disjoint-set forest with path halving and union by size.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

/// Partition of the vertex set. Component ids are the minimum vertex index of
/// each component; `members` lists components in order of their id.
struct Components {
  std::vector<Vertex> id;
  std::vector<std::vector<Vertex>> members;

  /// Index into `members` of the component with this id.
  std::size_t index_of(Vertex comp_id) const {
    auto it = std::lower_bound(members.begin(), members.end(), comp_id,
                               [](const std::vector<Vertex>& m, Vertex c) { return m.front() < c; });
    return static_cast<std::size_t>(it - members.begin());
  }

  /// Component indices sorted by size descending, ties by id.
  std::vector<std::size_t> by_size() const {
    std::vector<std::size_t> order(members.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return members[a].size() > members[b].size(); });
    return order;
  }
};

inline Components connected_components(const Graph& g) {
  const std::size_t n = g.vertex_count();
  UnionFind uf(n);
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v : g.neighbors(u)) {
      if (u < v) uf.unite(u, v);
    }
  }
  Components c;
  c.id.assign(n, 0);
  std::vector<std::size_t> slot(n, std::numeric_limits<std::size_t>::max());
  for (Vertex v = 0; v < n; ++v) {
    const std::size_t root = uf.find(v);
    if (slot[root] == std::numeric_limits<std::size_t>::max()) {
      slot[root] = c.members.size();
      c.members.push_back({});
    }
    c.members[slot[root]].push_back(v);
    c.id[v] = c.members[slot[root]].front();
  }
  return c;
}

/// Hop distances from a set of sources; kUnreachable elsewhere. When
/// `allowed` is given, the search only enters vertices it marks true.
inline std::vector<std::uint32_t> bfs_distances(const Graph& g, const std::vector<Vertex>& sources,
                                                const std::vector<char>* allowed = nullptr) {
  std::vector<std::uint32_t> dist(g.vertex_count(), kUnreachable);
  std::vector<Vertex> frontier;
  for (Vertex s : sources) {
    if (dist[s] == kUnreachable) {
      dist[s] = 0;
      frontier.push_back(s);
    }
  }
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    const Vertex u = frontier[head];
    for (Vertex v : g.neighbors(u)) {
      if (dist[v] != kUnreachable) continue;
      if (allowed != nullptr && !(*allowed)[v]) continue;
      dist[v] = dist[u] + 1;
      frontier.push_back(v);
    }
  }
  return dist;
}

enum class DiameterMode { exact, double_sweep };

struct DiameterResult {
  std::uint32_t value = 0;
  /// False when the value is a lower bound.
  bool exact = true;
};

inline constexpr std::size_t kExactDiameterCap = 30'000;

namespace detail {

// Local (compacted) adjacency of one component.
struct LocalGraph {
  std::vector<std::uint32_t> offsets;
  std::vector<std::uint32_t> adj;
};

inline LocalGraph localize(const Graph& g, const std::vector<Vertex>& comp) {
  std::vector<std::uint32_t> local(g.vertex_count(), kUnreachable);
  for (std::size_t i = 0; i < comp.size(); ++i) local[comp[i]] = static_cast<std::uint32_t>(i);
  LocalGraph lg;
  lg.offsets.assign(comp.size() + 1, 0);
  for (std::size_t i = 0; i < comp.size(); ++i) {
    for (Vertex v : g.neighbors(comp[i])) {
      require(local[v] != kUnreachable, "vertex set is not a union of components");
      lg.adj.push_back(local[v]);
    }
    lg.offsets[i + 1] = static_cast<std::uint32_t>(lg.adj.size());
  }
  return lg;
}

// Eccentricities of 64 sources at once: bit b of seen[v] records whether
// source b has reached v.
inline std::uint32_t batch_max_eccentricity(const LocalGraph& lg, std::size_t first, std::size_t count,
                                            std::vector<std::uint64_t>& seen, std::vector<std::uint64_t>& cur,
                                            std::vector<std::uint64_t>& next) {
  const std::size_t n = lg.offsets.size() - 1;
  std::fill(seen.begin(), seen.end(), 0);
  std::fill(cur.begin(), cur.end(), 0);
  for (std::size_t b = 0; b < count; ++b) {
    seen[first + b] |= std::uint64_t{1} << b;
    cur[first + b] |= std::uint64_t{1} << b;
  }
  std::uint32_t level = 0;
  while (true) {
    bool any = false;
    for (std::size_t v = 0; v < n; ++v) {
      std::uint64_t acc = 0;
      for (std::uint32_t k = lg.offsets[v]; k < lg.offsets[v + 1]; ++k) acc |= cur[lg.adj[k]];
      acc &= ~seen[v];
      next[v] = acc;
      any = any || acc != 0;
    }
    if (!any) return level;
    ++level;
    for (std::size_t v = 0; v < n; ++v) seen[v] |= next[v];
    cur.swap(next);
  }
}

inline std::pair<std::uint32_t, std::uint32_t> farthest(const LocalGraph& lg, std::uint32_t src) {
  const std::size_t n = lg.offsets.size() - 1;
  std::vector<std::uint32_t> dist(n, kUnreachable);
  std::vector<std::uint32_t> queue{src};
  dist[src] = 0;
  std::uint32_t best = src;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::uint32_t u = queue[head];
    if (dist[u] > dist[best] || (dist[u] == dist[best] && u < best)) best = u;
    for (std::uint32_t k = lg.offsets[u]; k < lg.offsets[u + 1]; ++k) {
      const std::uint32_t v = lg.adj[k];
      if (dist[v] == kUnreachable) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return {best, dist[best]};
}

}  // namespace detail

/// Diameter of a connected vertex set. Exact mode runs BFS from every
/// source, 64 at a time; double_sweep returns a lower bound from four
/// farthest-point sweeps starting at the first vertex.
inline DiameterResult component_diameter(const Graph& g, const std::vector<Vertex>& comp, DiameterMode mode,
                                         std::size_t cap = kExactDiameterCap) {
  if (comp.size() <= 1) return {0, true};
  const auto lg = detail::localize(g, comp);
  if (mode == DiameterMode::exact) {
    if (comp.size() > cap) throw ValidationError("component exceeds exact-diameter cap");
    const std::size_t n = comp.size();
    std::vector<std::uint64_t> seen(n), cur(n), next(n);
    std::uint32_t best = 0;
    for (std::size_t first = 0; first < n; first += 64) {
      const std::size_t count = std::min<std::size_t>(64, n - first);
      best = std::max(best, detail::batch_max_eccentricity(lg, first, count, seen, cur, next));
    }
    return {best, true};
  }
  std::uint32_t src = 0, best = 0;
  for (int sweep = 0; sweep < 4; ++sweep) {
    const auto [far, d] = detail::farthest(lg, src);
    best = std::max(best, d);
    src = far;
  }
  return {best, false};
}

/// Exact when the component fits under the cap, otherwise a flagged lower bound.
inline DiameterResult component_diameter_auto(const Graph& g, const std::vector<Vertex>& comp,
                                              std::size_t cap = kExactDiameterCap) {
  return component_diameter(g, comp, comp.size() <= cap ? DiameterMode::exact : DiameterMode::double_sweep, cap);
}

/// {v : r_v <= R/2}, probes included.
inline std::vector<Vertex> center_clique(const Graph& g) {
  std::vector<Vertex> out;
  const double half = 0.5 * g.params().R;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (g.radius(v) <= half) out.push_back(v);
  }
  return out;
}

/// Pairwise adjacency of the clique.
inline bool verify_clique(const Graph& g, const std::vector<Vertex>& clique) {
  for (std::size_t i = 0; i < clique.size(); ++i) {
    for (std::size_t j = i + 1; j < clique.size(); ++j) {
      if (!g.adjacent(clique[i], clique[j])) return false;
    }
  }
  return true;
}

/// Expected clique size n (cosh(alpha R/2) - 1) / (cosh(alpha R) - 1).
inline double expected_clique_size(const ModelParams& p) {
  return static_cast<double>(p.n) * radial_cdf(0.5 * p.R, p);
}

/// Hop count to the center clique; kUnreachable when there is no path.
inline std::vector<std::uint32_t> distance_to_center(const Graph& g) { return bfs_distances(g, center_clique(g)); }

/// An induced-path component in path order.
struct PathComponent {
  std::vector<Vertex> vertices;
  std::size_t length() const { return vertices.empty() ? 0 : vertices.size() - 1; }
  bool in_band = false;
};

/// Band (R - c2, R - c1] offsets for path hunting.
struct PathBand {
  double c1 = 0.2;
  double c2 = 0.3;
};

struct InducedPathReport {
  /// Every component whose induced subgraph is a simple path, singletons included.
  std::vector<PathComponent> paths;
  std::size_t singletons = 0;
  /// Longest length among components with length >= 1 (0 when none).
  std::size_t longest_overall = 0;
  std::size_t longest_in_band = 0;
  bool band_requested = false;
};

/// A connected component is a path iff it has |C| - 1 edges and maximum
/// degree at most 2.
inline InducedPathReport induced_path_components(const Graph& g, const Components& comps,
                                                 std::optional<PathBand> band = std::nullopt) {
  InducedPathReport rep;
  rep.band_requested = band.has_value();
  const double R = g.params().R;
  for (const auto& m : comps.members) {
    std::size_t degree_sum = 0, max_degree = 0;
    for (Vertex v : m) {
      degree_sum += g.degree(v);
      max_degree = std::max(max_degree, g.degree(v));
    }
    if (degree_sum != 2 * (m.size() - 1) || max_degree > 2) continue;
    PathComponent pc;
    Vertex start = m.front();
    for (Vertex v : m) {
      if (g.degree(v) <= 1) {
        start = v;
        break;
      }
    }
    Vertex prev = start, cur = start;
    pc.vertices.push_back(start);
    while (pc.vertices.size() < m.size()) {
      Vertex nxt = cur;
      for (Vertex w : g.neighbors(cur)) {
        if (w != prev) nxt = w;
      }
      if (pc.vertices.size() == 1) nxt = g.neighbors(cur).front();
      prev = cur;
      cur = nxt;
      pc.vertices.push_back(cur);
    }
    if (band) {
      pc.in_band = std::all_of(pc.vertices.begin(), pc.vertices.end(), [&](Vertex v) {
        return g.radius(v) >= R - band->c2 && g.radius(v) <= R - band->c1;
      });
    }
    if (m.size() == 1) ++rep.singletons;
    rep.longest_overall = std::max(rep.longest_overall, pc.length());
    if (pc.in_band) rep.longest_in_band = std::max(rep.longest_in_band, pc.length());
    rep.paths.push_back(std::move(pc));
  }
  return rep;
}

/// Consecutive vertices adjacent, non-consecutive ones not, and the vertex
/// set equal to a whole component.
inline bool verify_induced_path(const Graph& g, const Components& comps, const std::vector<Vertex>& path) {
  if (path.empty()) return false;
  for (std::size_t i = 0; i < path.size(); ++i) {
    for (std::size_t j = i + 1; j < path.size(); ++j) {
      if (g.adjacent(path[i], path[j]) != (j == i + 1)) return false;
    }
  }
  const auto& m = comps.members[comps.index_of(comps.id[path.front()])];
  std::vector<Vertex> sorted = path;
  std::sort(sorted.begin(), sorted.end());
  return sorted == m;
}

struct DegreeStats {
  /// histogram[k] = number of vertices of degree k.
  std::vector<std::uint64_t> histogram;
  /// ccdf[k] = fraction of vertices with degree >= k.
  std::vector<double> ccdf;
  double mean = 0.0;
  std::size_t window_lo = 0;
  std::size_t window_hi = 0;
  /// Least-squares slope of log ccdf against log degree over the window; NaN
  /// when fewer than two distinct degrees fall inside it.
  double slope = std::numeric_limits<double>::quiet_NaN();
};

/// Tail window defaults to [ceil(2 * mean degree), max degree].
inline DegreeStats degree_stats(const Graph& g, std::optional<std::pair<std::size_t, std::size_t>> window = {}) {
  DegreeStats s;
  const std::size_t n = g.vertex_count();
  std::size_t maxd = 0;
  for (Vertex v = 0; v < n; ++v) maxd = std::max(maxd, g.degree(v));
  s.histogram.assign(maxd + 1, 0);
  for (Vertex v = 0; v < n; ++v) ++s.histogram[g.degree(v)];
  if (n == 0) return s;
  s.mean = 2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(n);
  s.ccdf.assign(maxd + 1, 0.0);
  std::uint64_t tail = 0;
  for (std::size_t k = maxd + 1; k-- > 0;) {
    tail += s.histogram[k];
    s.ccdf[k] = static_cast<double>(tail) / static_cast<double>(n);
  }
  if (window) {
    s.window_lo = window->first;
    s.window_hi = std::min(window->second, maxd);
  } else {
    s.window_lo = static_cast<std::size_t>(std::ceil(2.0 * s.mean));
    s.window_hi = maxd;
  }
  std::vector<double> xs, ys;
  for (std::size_t k = std::max<std::size_t>(1, s.window_lo); k <= s.window_hi && k <= maxd; ++k) {
    if (s.histogram[k] == 0) continue;
    xs.push_back(std::log(static_cast<double>(k)));
    ys.push_back(std::log(s.ccdf[k]));
  }
  if (xs.size() >= 2) {
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (sxx > 0.0) s.slope = sxy / sxx;
  }
  return s;
}

struct ComponentStats {
  std::vector<std::size_t> sizes;  // descending
  std::size_t singletons = 0;
  std::size_t giant_size = 0;
  std::size_t second_size = 0;
  DiameterResult giant_diameter;
  /// Exact diameters of the non-giant components up to the cap, by size order.
  std::vector<std::uint32_t> other_diameters;
  std::size_t center_clique_size = 0;
  bool center_clique_verified = false;
  std::size_t longest_induced_path_overall = 0;
  std::size_t longest_induced_path_in_band = 0;
};

struct AnalysisOptions {
  std::size_t diameter_cap = kExactDiameterCap;
  /// Skip the diameter of every component except the giant.
  bool giant_only_diameter = true;
  PathBand band{};
  /// The clique is checked pairwise only up to this size.
  std::size_t clique_verify_cap = 2000;
};

inline ComponentStats component_stats(const Graph& g, const Components& comps, const AnalysisOptions& opt = {}) {
  ComponentStats s;
  const auto order = comps.by_size();
  for (std::size_t i : order) {
    s.sizes.push_back(comps.members[i].size());
    if (comps.members[i].size() == 1) ++s.singletons;
  }
  if (!order.empty()) {
    s.giant_size = s.sizes[0];
    s.giant_diameter = component_diameter_auto(g, comps.members[order[0]], opt.diameter_cap);
  }
  if (order.size() > 1) s.second_size = s.sizes[1];
  if (!opt.giant_only_diameter) {
    for (std::size_t k = 1; k < order.size(); ++k) {
      const auto& m = comps.members[order[k]];
      if (m.size() <= opt.diameter_cap) s.other_diameters.push_back(component_diameter(g, m, DiameterMode::exact).value);
    }
  }
  const auto clique = center_clique(g);
  s.center_clique_size = clique.size();
  if (clique.size() <= opt.clique_verify_cap) s.center_clique_verified = verify_clique(g, clique);
  const auto paths = induced_path_components(g, comps, opt.band);
  s.longest_induced_path_overall = paths.longest_overall;
  s.longest_induced_path_in_band = paths.longest_in_band;
  return s;
}

}  // namespace rhg
