#pragma once

// Band schedules and a deterministic re-enactment of the Expose exploration
// over a realized graph.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "error.hpp"
#include "graph.hpp"

namespace rhg {

struct BandSchedule {
  double alpha = 0.0;
  double R = 0.0;
  double C0 = 0.0;
  double i0_raw = 0.0;
  int i0 = 1;
  /// R_outer[0] = R/2, R_outer[i] = R e^{-alpha^i / 2}; extended until the
  /// gap to R drops below 1e-9 R.
  std::vector<double> R_outer;
  int j0 = 1;
  double c = 0.0;
  /// R_inner[i] = R (c - (i/2)(1 - c)(1 - alpha)) for i = 0..T.
  std::vector<double> R_inner;
  int T = 0;
  std::string clamp_note;

  /// Band index l with R_l < r <= R_{l+1}; -1 when r <= R/2.
  int outer_band(double r) const {
    if (r <= R_outer[0]) return -1;
    // R_l < r  <=>  alpha^l > -2 ln(r/R)  <=>  l < ln(-2 ln(r/R)) / ln(alpha)
    int l = 0;
    if (r < R) {
      const double x = std::log(-2.0 * std::log(r / R)) / std::log(alpha);
      l = std::max(0, static_cast<int>(std::ceil(x)) - 1);
    } else {
      l = static_cast<int>(R_outer.size()) - 1;
    }
    l = std::min(l, static_cast<int>(R_outer.size()) - 1);
    while (l > 0 && !(R_outer[l] < r)) --l;
    while (l + 1 < static_cast<int>(R_outer.size()) && R_outer[l + 1] < r) ++l;
    return l;
  }

  double outer(int i) const {
    require(i >= 0 && i < static_cast<int>(R_outer.size()), "outer band index out of range");
    return R_outer[i];
  }

  /// Smallest l with R_l > R - xi.
  int ell0(double xi) const {
    for (int l = 0; l < static_cast<int>(R_outer.size()); ++l) {
      if (R_outer[l] > R - xi) return l;
    }
    throw ValidationError("xi too small for the tabulated outer bands");
  }

  /// Descending thresholds t_0 > t_1 > ... > t_m = R/2 walked by
  /// descend_inner: outer radii R_{i0} .. R_{j0} when i0 > j0, then the
  /// inner radii R'_0 .. R'_T, then R/2.
  std::vector<double> inner_ladder() const {
    std::vector<double> t;
    for (int i = i0; i > j0; --i) t.push_back(R_outer[i]);
    for (double x : R_inner) t.push_back(x);
    t.push_back(0.5 * R);
    return t;
  }
};

inline double c0_constant(double alpha) { return 2.0 / (0.5 - 0.75 * alpha + 0.25 * alpha * alpha); }

inline bool j0_condition(double alpha, int j) {
  const double x = std::pow(alpha, j) / 2.0;
  return std::exp(-x) <= 1.0 - (1.0 - (1.0 - alpha) / 2.0) * x;
}

inline BandSchedule compute_schedule(const ModelParams& params, std::optional<int> band_depth_override = {}) {
  const double a = params.alpha;
  require(a > 0.5 && a < 1.0, "band schedule needs 1/2 < alpha < 1");
  BandSchedule s;
  s.alpha = a;
  s.R = params.R;
  s.C0 = c0_constant(a);
  s.i0_raw = std::log(2.0 * s.C0 * std::log(params.R) / params.R) / std::log(a);
  if (band_depth_override) {
    require(*band_depth_override >= 1, "band depth override must be >= 1");
    s.i0 = *band_depth_override;
    s.clamp_note = "i0 overridden to " + std::to_string(s.i0);
  } else {
    const long rounded = std::lround(s.i0_raw);
    s.i0 = static_cast<int>(std::max(1L, rounded));
    if (rounded < 1) s.clamp_note = "i0_raw " + format_decimal(s.i0_raw) + " clamped to 1";
  }
  s.R_outer.push_back(0.5 * params.R);
  for (int i = 1; i < 2000; ++i) {
    const double Ri = params.R * std::exp(-std::pow(a, i) / 2.0);
    s.R_outer.push_back(Ri);
    if (i > s.i0 + 1 && params.R - Ri < 1e-9 * params.R) break;
  }
  for (int j = 1;; ++j) {
    bool ok = true;
    for (int k = j; k <= j + 50 && ok; ++k) ok = j0_condition(a, k);
    if (ok) {
      s.j0 = j;
      break;
    }
    require(j < 10000, "no j0 found");
  }
  s.c = std::exp(-std::pow(a, s.j0) / 2.0);
  const double step = 0.5 * (1.0 - s.c) * (1.0 - a);
  s.T = 0;
  while (s.c - (s.T + 1) * step > 0.5) ++s.T;
  for (int i = 0; i <= s.T; ++i) s.R_inner.push_back(params.R * (s.c - i * step));
  return s;
}

// ---------------------------------------------------------------------------
// Center paths

/// Band-descending path from v: each vertex one outer band closer to the
/// origin, ending at a vertex with r <= R_{i0}. Backtracking search that
/// tries candidates in increasing index order, so the result is the
/// lexicographically first center path (the greedy minimum-index path
/// whenever that one succeeds).
inline std::optional<std::vector<Vertex>> find_center_path(const Graph& g, Vertex v, const BandSchedule& s) {
  const int l_start = s.outer_band(g.radius(v));
  require(l_start >= s.i0, "find_center_path needs r_v > R_{i0}");
  std::vector<char> dead(g.vertex_count(), 0);
  std::vector<Vertex> path{v};
  // Iterative DFS; cursor[k] is the next neighbor slot to try from path[k].
  std::vector<std::size_t> cursor{0};
  while (!path.empty()) {
    const Vertex u = path.back();
    const int band = l_start - static_cast<int>(path.size()) + 1;
    if (band < s.i0) return path;
    const double lo = s.R_outer[band - 1], hi = s.R_outer[band];
    auto nb = g.neighbors(u);
    bool pushed = false;
    while (cursor.back() < nb.size()) {
      const Vertex w = nb[cursor.back()++];
      if (dead[w]) continue;
      const double r = g.radius(w);
      if (r > lo && r <= hi) {
        path.push_back(w);
        cursor.push_back(0);
        pushed = true;
        break;
      }
    }
    if (!pushed) {
      dead[u] = 1;
      path.pop_back();
      cursor.pop_back();
    }
  }
  return std::nullopt;
}

/// True when path is a walk along edges whose vertex k lies in band l - k
/// and whose last vertex is in (R_{i0-1}, R_{i0}].
inline bool verify_center_path(const Graph& g, const std::vector<Vertex>& path, const BandSchedule& s) {
  if (path.empty()) return false;
  const int l = s.outer_band(g.radius(path.front()));
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (s.outer_band(g.radius(path[k])) != l - static_cast<int>(k)) return false;
    if (k > 0 && !is_edge(g.point(path[k - 1]), g.point(path[k]), g.params())) return false;
  }
  return s.outer_band(g.radius(path.back())) == s.i0 - 1;
}

/// Descent from r_v <= max(R_{i0}, R'_0) into B_O(R/2) along the inner
/// ladder. Each step takes the minimum-index neighbor in the next band, or
/// failing that the minimum-index neighbor further in; the path therefore
/// has at most one vertex per band. The returned path starts at v.
inline std::optional<std::vector<Vertex>> descend_inner(const Graph& g, Vertex v, const BandSchedule& s) {
  const auto t = s.inner_ladder();
  require(g.radius(v) <= t.front(), "descend_inner needs r_v <= max(R_{i0}, R'_0)");
  auto band_of = [&](double r) {
    // band k: t_{k+1} < r <= t_k; m = t.size() - 1 means r <= R/2
    std::size_t k = 0;
    while (k + 1 < t.size() && r <= t[k + 1]) ++k;
    return k;
  };
  std::vector<Vertex> path{v};
  std::size_t k = band_of(g.radius(v));
  while (k + 1 < t.size()) {
    const double hi = t[k + 1];
    const double lo = (k + 2 < t.size()) ? t[k + 2] : -1.0;
    std::optional<Vertex> next, deeper;
    for (Vertex w : g.neighbors(path.back())) {
      const double r = g.radius(w);
      if (r > lo && r <= hi) {
        next = w;
        break;
      }
      if (r <= lo && !deeper) deeper = w;
    }
    const auto chosen = next ? next : deeper;
    if (!chosen) return std::nullopt;
    path.push_back(*chosen);
    k = band_of(g.radius(*chosen));
  }
  return path;
}

/// (i0 - j0)^+ + T + 1, the number of ladder bands.
inline std::size_t descend_inner_max_steps(const BandSchedule& s) { return s.inner_ladder().size() - 1; }

// ---------------------------------------------------------------------------
// Expose

struct ExposeConfig {
  double xi = 1.0;
  double epsilon = 0.1;
  /// Angular width w per phase; A^j(rho) has half-width (j + 1) w around Q.
  /// Defaults to (ln n)^{C0 + epsilon} / n.
  std::optional<double> window_width;
  /// Phase count factor: phases j = 0 .. ceil(C'' ln n).
  double c_phases = 2.0;
  std::optional<int> max_phases;
  std::optional<int> band_depth_override;

  void validate() const {
    require(xi > 0.0, "xi must be > 0");
    require(epsilon >= 0.0, "epsilon must be >= 0");
    require(c_phases > 0.0, "C'' must be > 0");
    if (window_width) require(*window_width > 0.0 && *window_width <= kPi, "window width must lie in (0, pi]");
    if (max_phases) require(*max_phases >= 0, "max_phases must be >= 0");
  }
};

enum class Verdict { success, no_path, failure };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::success: return "success";
    case Verdict::no_path: return "no_path";
    default: return "failure";
  }
}

/// One sub-phase: the exposed set A^j(R_{i0}) u A^{j+1}(R_l).
struct RegionTraceEntry {
  int phase = 0;
  int ell = 0;
  double R_ell = 0.0;
  double half_width_inner = 0.0;  // A^j(R_{i0})
  double half_width_outer = 0.0;  // A^{j+1}(R_l)
  bool inner_clamped = false;
  bool outer_clamped = false;
  std::size_t exposed = 0;
  std::optional<Vertex> terminal;
  /// "center_path", "no_center_path", "no_terminal" or "start".
  std::string event;
};

struct ExposeOutcome {
  Verdict verdict = Verdict::failure;
  /// Q to the center-path terminal (r <= R_{i0}) when successful.
  std::vector<Vertex> path;
  /// `path` continued by descend_inner into B_O(R/2) when that succeeds.
  std::vector<Vertex> path_to_center;
  int phase_reached = 0;
  std::size_t vertices_touched = 0;
  std::vector<RegionTraceEntry> region_trace;
  double window_width = 0.0;
  int max_phases = 0;
  int ell0 = 0;
  std::string clamp_note;
};

/// Membership in A^j(rho) = {P : r_P > rho, |theta_P - theta_Q| <= (j + 1) w},
/// with the half-width capped at pi.
inline bool in_window(const PolarPoint& p, double theta_q, int j, double w, double rho) {
  return p.r > rho && angular_difference(p.theta, theta_q) <= std::min(kPi, (j + 1) * w);
}

namespace detail {

inline std::vector<Vertex> bfs_path(const std::vector<Vertex>& parent, Vertex src, Vertex dst) {
  std::vector<Vertex> p{dst};
  while (p.back() != src) p.push_back(parent[p.back()]);
  std::reverse(p.begin(), p.end());
  return p;
}

}  // namespace detail

/// Expose replayed on the realized point set. Regions are filters on the
/// vertices; the path search of each sub-phase is a BFS from Q inside the
/// exposed set. A terminal is a reached vertex of A^{j+1}(R_l) with
/// r <= R - xi that has not been tried before; the closest one (then the
/// minimum index) is tried, at most one per phase.
inline ExposeOutcome expose(const Graph& g, Vertex q, const ExposeConfig& cfg, const BandSchedule& s) {
  cfg.validate();
  const ModelParams& p = g.params();
  const double ln_n = std::log(static_cast<double>(std::max<std::uint64_t>(p.n, 2)));
  ExposeOutcome out;
  out.clamp_note = s.clamp_note;
  out.window_width = cfg.window_width.value_or(std::min(kPi, std::pow(ln_n, s.C0 + cfg.epsilon) / static_cast<double>(p.n)));
  if (!cfg.window_width && out.window_width >= kPi) {
    if (!out.clamp_note.empty()) out.clamp_note += "; ";
    out.clamp_note += "window width clamped to pi";
  }
  out.max_phases = cfg.max_phases.value_or(static_cast<int>(std::ceil(cfg.c_phases * ln_n)));
  out.ell0 = s.ell0(cfg.xi);
  require(g.radius(q) > s.outer(s.i0), "expose needs r_Q > R_{i0}");

  const double tq = g.angle(q);
  std::vector<char> touched(g.vertex_count(), 0);
  auto touch = [&](const std::vector<Vertex>& vs) {
    for (Vertex v : vs) {
      if (!touched[v]) {
        touched[v] = 1;
        ++out.vertices_touched;
      }
    }
  };
  auto succeed = [&](std::vector<Vertex> prefix, const std::vector<Vertex>& center) {
    prefix.insert(prefix.end(), center.begin() + 1, center.end());
    out.verdict = Verdict::success;
    out.path = std::move(prefix);
    if (auto tail = descend_inner(g, out.path.back(), s)) {
      out.path_to_center = out.path;
      out.path_to_center.insert(out.path_to_center.end(), tail->begin() + 1, tail->end());
    }
    touch(out.path);
  };

  {
    RegionTraceEntry e;
    e.event = "start";
    e.terminal = q;
    const auto cp = find_center_path(g, q, s);
    e.event = cp ? "center_path" : "no_center_path";
    out.region_trace.push_back(e);
    if (cp) {
      succeed({q}, *cp);
      return out;
    }
  }

  const double R_i0 = s.outer(s.i0);
  auto half_width = [&](int j) { return std::min(kPi, (j + 1) * out.window_width); };
  auto in_A = [&](Vertex v, int j, double rho) { return in_window(g.point(v), tq, j, out.window_width, rho); };

  std::vector<char> attempted(g.vertex_count(), 0);
  attempted[q] = 1;
  // BFS results keyed by (inner half-width, outer half-width, l); with
  // clamped windows many sub-phases expose the same set.
  struct Search {
    std::vector<std::uint32_t> dist;
    std::vector<Vertex> parent;
    std::vector<Vertex> order;
  };
  std::map<std::tuple<double, double, int>, Search> memo;

  for (int j = 0; j <= out.max_phases; ++j) {
    out.phase_reached = j;
    bool attempted_this_phase = false;
    for (int l = out.ell0; !attempted_this_phase; --l) {
      if (l == s.i0) {
        out.verdict = Verdict::no_path;
        RegionTraceEntry e;
        e.phase = j;
        e.ell = l;
        e.R_ell = s.outer(l);
        e.event = "no_path";
        out.region_trace.push_back(e);
        return out;
      }
      RegionTraceEntry e;
      e.phase = j;
      e.ell = l;
      e.R_ell = s.outer(l);
      e.half_width_inner = half_width(j);
      e.half_width_outer = half_width(j + 1);
      e.inner_clamped = (j + 1) * out.window_width >= kPi;
      e.outer_clamped = (j + 2) * out.window_width >= kPi;

      const auto key = std::make_tuple(e.half_width_inner, e.half_width_outer, l);
      auto it = memo.find(key);
      if (it == memo.end()) {
        Search sr;
        sr.dist.assign(g.vertex_count(), kUnreachable);
        sr.parent.assign(g.vertex_count(), q);
        sr.dist[q] = 0;
        sr.order.push_back(q);
        for (std::size_t head = 0; head < sr.order.size(); ++head) {
          const Vertex u = sr.order[head];
          for (Vertex w : g.neighbors(u)) {
            if (sr.dist[w] != kUnreachable) continue;
            if (!(in_A(w, j, R_i0) || in_A(w, j + 1, e.R_ell))) continue;
            sr.dist[w] = sr.dist[u] + 1;
            sr.parent[w] = u;
            sr.order.push_back(w);
          }
        }
        it = memo.emplace(key, std::move(sr)).first;
      }
      const Search& sr = it->second;
      e.exposed = sr.order.size();
      touch(sr.order);

      std::optional<Vertex> terminal;
      for (Vertex v : sr.order) {
        if (v == q || attempted[v]) continue;
        if (!in_A(v, j + 1, e.R_ell) || g.radius(v) > p.R - cfg.xi) continue;
        if (!terminal || sr.dist[v] < sr.dist[*terminal] || (sr.dist[v] == sr.dist[*terminal] && v < *terminal)) {
          terminal = v;
        }
      }
      if (!terminal) {
        e.event = "no_terminal";
        out.region_trace.push_back(e);
        continue;
      }
      attempted[*terminal] = 1;
      attempted_this_phase = true;
      e.terminal = terminal;
      const auto prefix = detail::bfs_path(sr.parent, q, *terminal);
      const auto cp = find_center_path(g, *terminal, s);
      e.event = cp ? "center_path" : "no_center_path";
      out.region_trace.push_back(e);
      if (cp) {
        succeed(prefix, *cp);
        return out;
      }
    }
  }
  out.verdict = Verdict::failure;
  return out;
}

/// Every consecutive pair passes the edge predicate.
inline bool verify_walk(const Graph& g, const std::vector<Vertex>& path) {
  for (std::size_t k = 1; k < path.size(); ++k) {
    if (!is_edge(g.point(path[k - 1]), g.point(path[k]), g.params())) return false;
  }
  return !path.empty();
}

// ---------------------------------------------------------------------------
// Boundary paths

struct BoundaryPathRecord {
  Vertex component_id = 0;
  std::size_t size = 0;
  /// Longest shortest path inside the component (its diameter).
  std::size_t length = 0;
  /// Smallest arc containing every angle of the component.
  double spread = 0.0;
  bool length_violation = false;
  bool spread_violation = false;
};

struct BoundaryAudit {
  double xi = 0.0;
  double K = 10.0;
  double K_prime = 10.0;
  double length_bound = 0.0;
  double spread_bound = 0.0;
  std::vector<BoundaryPathRecord> records;
  std::size_t max_length = 0;
  double max_spread = 0.0;
  std::size_t violations = 0;
};

/// Smallest arc length covering a set of angles.
inline double angular_spread(std::vector<double> angles) {
  if (angles.size() <= 1) return 0.0;
  std::sort(angles.begin(), angles.end());
  double gap = angles.front() + kTwoPi - angles.back();
  for (std::size_t i = 1; i < angles.size(); ++i) gap = std::max(gap, angles[i] - angles[i - 1]);
  return std::max(0.0, std::min(kPi * 2.0, kTwoPi - gap));
}

/// Components (of size >= 2) of the subgraph induced on {v : r_v > R - xi};
/// each reports its longest geodesic and angular spread.
inline BoundaryAudit boundary_path_audit(const Graph& g, double xi, double K = 10.0, double K_prime = 10.0) {
  require(xi > 0.0, "xi must be > 0");
  BoundaryAudit a;
  a.xi = xi;
  a.K = K;
  a.K_prime = K_prime;
  const ModelParams& p = g.params();
  const double ln_n = std::log(static_cast<double>(std::max<std::uint64_t>(p.n, 2)));
  a.length_bound = K * ln_n;
  a.spread_bound = K_prime * ln_n / static_cast<double>(p.n);
  const std::size_t nv = g.vertex_count();
  // Compact CSR of the subgraph induced on the boundary vertices.
  std::vector<std::uint32_t> local(nv, kUnreachable);
  std::vector<Vertex> global;
  for (Vertex v = 0; v < nv; ++v) {
    if (g.radius(v) > p.R - xi) {
      local[v] = static_cast<std::uint32_t>(global.size());
      global.push_back(v);
    }
  }
  const std::size_t m = global.size();
  std::vector<std::uint32_t> off(m + 1, 0), adj;
  for (std::size_t i = 0; i < m; ++i) {
    for (Vertex w : g.neighbors(global[i])) {
      if (local[w] != kUnreachable) adj.push_back(local[w]);
    }
    off[i + 1] = static_cast<std::uint32_t>(adj.size());
  }
  std::vector<std::uint32_t> dist(m, kUnreachable), comp_of(m, kUnreachable);
  std::vector<std::uint32_t> queue;
  auto bfs = [&](std::uint32_t src) {
    queue.assign(1, src);
    dist[src] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::uint32_t u = queue[head];
      for (std::uint32_t k = off[u]; k < off[u + 1]; ++k) {
        if (dist[adj[k]] == kUnreachable) {
          dist[adj[k]] = dist[u] + 1;
          queue.push_back(adj[k]);
        }
      }
    }
  };
  for (std::uint32_t i = 0; i < m; ++i) {
    if (comp_of[i] != kUnreachable) continue;
    bfs(i);
    const std::vector<std::uint32_t> comp = queue;
    for (std::uint32_t u : comp) {
      comp_of[u] = i;
      dist[u] = kUnreachable;
    }
    if (comp.size() < 2) continue;
    BoundaryPathRecord rec;
    rec.component_id = global[i];
    rec.size = comp.size();
    std::uint32_t diam = 0;
    for (std::uint32_t src : comp) {
      bfs(src);
      for (std::uint32_t u : queue) {
        diam = std::max(diam, dist[u]);
        dist[u] = kUnreachable;
      }
    }
    rec.length = diam;
    std::vector<double> angles;
    for (std::uint32_t u : comp) angles.push_back(g.angle(global[u]));
    rec.spread = std::min(kPi, angular_spread(angles));
    rec.length_violation = static_cast<double>(rec.length) > a.length_bound;
    rec.spread_violation = rec.spread > a.spread_bound;
    a.max_length = std::max(a.max_length, rec.length);
    a.max_spread = std::max(a.max_spread, rec.spread);
    a.violations += (rec.length_violation || rec.spread_violation) ? 1 : 0;
    a.records.push_back(rec);
  }
  return a;
}

}  // namespace rhg
