#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "geometry.hpp"
#include "sampler.hpp"

namespace rhg {

using Vertex = std::uint32_t;

enum class Builder { naive, fast, loaded };

inline const char* to_string(Builder b) {
  switch (b) {
    case Builder::naive: return "naive";
    case Builder::fast: return "fast";
    default: return "loaded";
  }
}

/// Immutable graph over a SampleSet. Vertices 0..|points|-1 are the model
/// points, followed by the probes. Adjacency is CSR with strictly sorted
/// neighbor lists.
class Graph {
 public:
  Graph() = default;

  Graph(SampleSet points, const std::vector<std::pair<Vertex, Vertex>>& edges, Builder builder)
      : points_(std::move(points)), builder_(builder) {
    coords_ = points_.points;
    coords_.insert(coords_.end(), points_.probes.begin(), points_.probes.end());
    const std::size_t nv = coords_.size();
    std::vector<std::uint64_t> deg(nv + 1, 0);
    for (const auto& [u, v] : edges) {
      require(u != v && u < nv && v < nv, "edge endpoints out of range or self-loop");
      ++deg[u];
      ++deg[v];
    }
    offsets_.assign(nv + 1, 0);
    for (std::size_t v = 0; v < nv; ++v) offsets_[v + 1] = offsets_[v] + deg[v];
    neighbors_.resize(offsets_[nv]);
    std::vector<std::uint64_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& [u, v] : edges) {
      neighbors_[fill[u]++] = v;
      neighbors_[fill[v]++] = u;
    }
    for (std::size_t v = 0; v < nv; ++v) {
      auto first = neighbors_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]);
      auto last = neighbors_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]);
      std::sort(first, last);
      require(std::adjacent_find(first, last) == last, "duplicate edge");
    }
    edge_count_ = edges.size();
  }

  std::size_t vertex_count() const { return coords_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  const SampleSet& sample() const { return points_; }
  const ModelParams& params() const { return points_.params; }
  std::uint64_t seed() const { return points_.seed; }
  Builder builder() const { return builder_; }

  const PolarPoint& point(Vertex v) const { return coords_[v]; }
  double radius(Vertex v) const { return coords_[v].r; }
  double angle(Vertex v) const { return coords_[v].theta; }
  bool is_probe(Vertex v) const { return v >= points_.points.size(); }

  std::span<const Vertex> neighbors(Vertex v) const {
    return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
  }
  std::size_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }

  bool adjacent(Vertex u, Vertex v) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  /// Edges (u, v) with u < v in lexicographic order.
  std::vector<std::pair<Vertex, Vertex>> edges() const {
    std::vector<std::pair<Vertex, Vertex>> out;
    out.reserve(edge_count_);
    for (Vertex u = 0; u < vertex_count(); ++u) {
      for (Vertex v : neighbors(u)) {
        if (u < v) out.emplace_back(u, v);
      }
    }
    return out;
  }

  /// Same points and adjacency (the builder tag is not compared).
  bool same_graph(const Graph& o) const {
    return points_ == o.points_ && offsets_ == o.offsets_ && neighbors_ == o.neighbors_;
  }

 private:
  SampleSet points_;
  std::vector<PolarPoint> coords_;
  std::vector<std::uint64_t> offsets_{0};
  std::vector<Vertex> neighbors_;
  std::size_t edge_count_ = 0;
  Builder builder_ = Builder::naive;
};

inline std::vector<PolarPoint> all_vertices(const SampleSet& set) {
  std::vector<PolarPoint> v = set.points;
  v.insert(v.end(), set.probes.begin(), set.probes.end());
  return v;
}

/// Precomputed per-vertex terms for the canonical edge predicate.
class EdgeOracle {
 public:
  EdgeOracle(const std::vector<PolarPoint>& pts, double R)
      : pts_(pts), sinh_(pts.size()), R_(R), cosh_R_(std::cosh(R)) {
    for (std::size_t i = 0; i < pts.size(); ++i) sinh_[i] = std::sinh(pts[i].r);
  }

  bool operator()(std::size_t u, std::size_t v) const {
    const auto& pu = pts_[u];
    const auto& pv = pts_[v];
    const double dtheta = angular_difference(pu.theta, pv.theta);
    if (pu.r >= pv.r) return detail::within_canonical(pu.r, sinh_[u], pv.r, sinh_[v], dtheta, R_, cosh_R_);
    return detail::within_canonical(pv.r, sinh_[v], pu.r, sinh_[u], dtheta, R_, cosh_R_);
  }

 private:
  const std::vector<PolarPoint>& pts_;
  std::vector<double> sinh_;
  double R_;
  double cosh_R_;
};

inline constexpr std::size_t kNaiveSizeGuard = 50'000;

/// All-pairs construction; the reference the fast builder must reproduce.
inline Graph build_naive(SampleSet set, std::size_t size_guard = kNaiveSizeGuard) {
  const auto pts = all_vertices(set);
  require(pts.size() <= size_guard, "build_naive: vertex count exceeds the quadratic-cost guard");
  EdgeOracle edge(pts, set.params.R);
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (std::size_t u = 0; u < pts.size(); ++u) {
    for (std::size_t v = u + 1; v < pts.size(); ++v) {
      if (edge(u, v)) edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
    }
  }
  return Graph(std::move(set), edges, Builder::naive);
}

/// Angular sweep over radial layers. Vertices are bucketed into unit-width
/// radial layers and sorted by angle inside each layer. For a vertex u and a
/// layer with inner radius lo, every neighbor v in that layer satisfies
/// dtheta <= max_angle_for_edge(r_u, lo), because the threshold is
/// nonincreasing in either radius. Candidates in that window are then
/// decided by the same canonical predicate build_naive uses, so both
/// builders produce identical edge sets.
inline Graph build_fast(SampleSet set, double layer_width = 1.0) {
  const auto pts = all_vertices(set);
  const double R = set.params.R;
  EdgeOracle edge(pts, R);
  const std::size_t nv = pts.size();
  const auto layer_count = static_cast<std::size_t>(std::ceil(R / layer_width)) + 1;

  struct Entry {
    double theta;
    Vertex v;
  };
  std::vector<std::vector<Entry>> layers(layer_count);
  for (std::size_t v = 0; v < nv; ++v) {
    const auto k = std::min(layer_count - 1, static_cast<std::size_t>(pts[v].r / layer_width));
    layers[k].push_back({pts[v].theta, static_cast<Vertex>(v)});
  }
  for (auto& layer : layers) {
    std::sort(layer.begin(), layer.end(),
              [](const Entry& a, const Entry& b) { return a.theta < b.theta || (a.theta == b.theta && a.v < b.v); });
  }

  std::vector<std::pair<Vertex, Vertex>> edges;
  auto scan = [&](std::size_t u, const std::vector<Entry>& layer, double lo, double hi) {
    auto first = std::lower_bound(layer.begin(), layer.end(), lo,
                                  [](const Entry& e, double t) { return e.theta < t; });
    auto last = std::upper_bound(layer.begin(), layer.end(), hi,
                                 [](double t, const Entry& e) { return t < e.theta; });
    for (auto it = first; it < last; ++it) {
      if (it->v > u && edge(u, it->v)) edges.emplace_back(static_cast<Vertex>(u), it->v);
    }
  };

  for (std::size_t u = 0; u < nv; ++u) {
    const double ru = pts[u].r, tu = pts[u].theta;
    for (std::size_t k = 0; k < layer_count; ++k) {
      const auto& layer = layers[k];
      if (layer.empty()) continue;
      const double lo_r = static_cast<double>(k) * layer_width;
      double w = max_angle_within(ru, lo_r, R);
      w = w * (1.0 + 1e-9) + 1e-12;
      if (w >= kPi) {
        scan(u, layer, -1.0, 2.0 * kTwoPi);
        continue;
      }
      const double a = tu - w, b = tu + w;
      if (a < 0.0) {
        scan(u, layer, 0.0, b);
        scan(u, layer, a + kTwoPi, kTwoPi);
      } else if (b >= kTwoPi) {
        scan(u, layer, a, kTwoPi);
        scan(u, layer, 0.0, b - kTwoPi);
      } else {
        scan(u, layer, a, b);
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  return Graph(std::move(set), edges, Builder::fast);
}

// ---------------------------------------------------------------------------
// Edge file (TSV) and graph bundles

/// FNV-1a 64 over the edge lines exactly as written (including newlines).
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string to_hex(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

inline std::string edge_body(const Graph& g) {
  std::string body;
  for (const auto& [u, v] : g.edges()) {
    body += std::to_string(u);
    body += '\t';
    body += std::to_string(v);
    body += '\n';
  }
  return body;
}

inline void write_edges(const Graph& g, std::ostream& out) {
  const std::string body = edge_body(g);
  out << "# rhg-edges v1 count=" << g.edge_count() << " checksum=" << to_hex(fnv1a(body)) << '\n' << body;
}

/// Reads an edge file against an already loaded point set. Verifies the
/// checksum, ordering, and that every edge satisfies the edge rule under the
/// point header's R.
inline Graph read_edges(SampleSet set, std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("edge file is empty");
  const auto fields = detail::parse_header_fields(line, "# rhg-edges v1 ");
  const auto count = parse_int<std::uint64_t>(detail::field(fields, "count"), "count");
  const std::string checksum(detail::field(fields, "checksum"));
  std::string body;
  std::vector<std::pair<Vertex, Vertex>> edges;
  edges.reserve(count);
  const auto nv = set.size();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    body += line;
    body += '\n';
    const auto cols = detail::split(line, '\t');
    if (cols.size() != 2) throw ValidationError("edge row must have 2 columns");
    const auto u = parse_int<Vertex>(cols[0], "u");
    const auto v = parse_int<Vertex>(cols[1], "v");
    if (!(u < v) || v >= nv) throw ValidationError("edge row must satisfy u < v < vertex count");
    if (!edges.empty() && !(edges.back() < std::make_pair(u, v))) {
      throw ValidationError("edge rows must be strictly lexicographically sorted");
    }
    edges.emplace_back(u, v);
  }
  if (edges.size() != count) {
    throw ValidationError("edge file truncated: header count " + std::to_string(count) + ", found " +
                          std::to_string(edges.size()));
  }
  if (to_hex(fnv1a(body)) != checksum) throw ValidationError("edge file checksum mismatch");
  const auto pts = all_vertices(set);
  EdgeOracle edge(pts, set.params.R);
  for (const auto& [u, v] : edges) {
    if (!edge(u, v)) {
      throw ValidationError("edge " + std::to_string(u) + "-" + std::to_string(v) +
                            " violates the edge rule under the header parameters");
    }
  }
  return Graph(std::move(set), edges, Builder::loaded);
}

inline void save_graph(const Graph& g, const std::string& points_path, const std::string& edges_path) {
  std::ofstream pts(points_path);
  std::ofstream eds(edges_path);
  if (!pts || !eds) throw ValidationError("cannot open graph bundle for writing");
  write_points(g.sample(), pts);
  write_edges(g, eds);
  if (!pts || !eds) throw ValidationError("I/O error while writing graph bundle");
}

inline Graph load_graph(const std::string& points_path, const std::string& edges_path) {
  std::ifstream pts(points_path);
  std::ifstream eds(edges_path);
  if (!pts) throw ValidationError("cannot open points file '" + points_path + "'");
  if (!eds) throw ValidationError("cannot open edge file '" + edges_path + "'");
  return read_edges(read_points(pts), eds);
}

}  // namespace rhg
