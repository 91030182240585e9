#pragma once

// Single-run experiment reports, their JSON form, and resumable sweeps.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "analysis.hpp"
#include "explorer.hpp"
#include "graph.hpp"
#include "sampler.hpp"

namespace rhg {

using json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "rhg-report v1";
inline constexpr const char* kToolVersion = "rhg 1.0.0";

struct ExposeSummary {
  std::size_t queries = 0;
  std::size_t success = 0;
  std::size_t no_path = 0;
  std::size_t failure = 0;
  /// Queries whose verdict disagrees with reachability of the center clique.
  std::size_t disagreements = 0;
  /// Disagreements among queries that do reach the clique.
  std::size_t disagreements_connected = 0;
  std::size_t invalid_paths = 0;
};

struct RunOptions {
  Builder builder = Builder::fast;
  AnalysisOptions analysis{};
  /// Number of Expose queries (vertices with r > R_{i0}, chosen by a seeded
  /// shuffle); 0 disables the explorer.
  std::size_t expose_queries = 0;
  ExposeConfig expose{};
  /// Boundary audit margin; unset disables the audit.
  std::optional<double> boundary_xi;
  double boundary_K = 10.0;
  double boundary_K_prime = 10.0;
};

struct ExperimentReport {
  ModelParams params;
  std::uint64_t seed = 0;
  SampleModel model = SampleModel::uniform;
  Builder builder = Builder::fast;
  std::size_t vertex_count = 0;
  std::size_t edge_count = 0;
  ComponentStats stats;
  DegreeStats degrees;
  std::optional<ExposeSummary> expose;
  std::optional<BoundaryAudit> boundary;
  std::map<std::string, double> timings;
};

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

/// Query vertices for the explorer: every vertex with r > R_{i0}, shuffled by
/// a seeded Fisher-Yates pass, first `count` kept.
inline std::vector<Vertex> choose_expose_queries(const Graph& g, const BandSchedule& s, std::size_t count,
                                                 std::uint64_t seed) {
  std::vector<Vertex> pool;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (g.radius(v) > s.outer(s.i0)) pool.push_back(v);
  }
  StreamRng rng(seed, 0x51ED);
  for (std::size_t i = pool.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng() % i);
    std::swap(pool[i - 1], pool[j]);
  }
  if (pool.size() > count) pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

/// Runs Expose for each query and compares the verdict with reachability of
/// the center clique.
inline ExposeSummary expose_audit(const Graph& g, const std::vector<Vertex>& queries, const ExposeConfig& cfg,
                                  const BandSchedule& s, const std::vector<std::uint32_t>& dist_center) {
  ExposeSummary sum;
  for (Vertex q : queries) {
    const auto out = expose(g, q, cfg, s);
    ++sum.queries;
    const bool reached = dist_center[q] != kUnreachable;
    switch (out.verdict) {
      case Verdict::success: ++sum.success; break;
      case Verdict::no_path: ++sum.no_path; break;
      case Verdict::failure: ++sum.failure; break;
    }
    const bool ok = out.verdict == Verdict::success;
    if (ok != reached) {
      ++sum.disagreements;
      if (reached) ++sum.disagreements_connected;
    }
    if (ok && (!verify_walk(g, out.path) || out.path.front() != q || g.radius(out.path.back()) > s.outer(s.i0))) {
      ++sum.invalid_paths;
    }
  }
  return sum;
}

inline ExperimentReport analyze_graph(const Graph& g, const RunOptions& opt = {}) {
  ExperimentReport rep;
  rep.params = g.params();
  rep.seed = g.seed();
  rep.model = g.sample().model;
  rep.builder = g.builder();
  rep.vertex_count = g.vertex_count();
  rep.edge_count = g.edge_count();
  detail::Stopwatch sw;
  const auto comps = connected_components(g);
  rep.timings["components"] = sw.seconds();
  detail::Stopwatch sw2;
  rep.stats = component_stats(g, comps, opt.analysis);
  rep.timings["component_stats"] = sw2.seconds();
  rep.degrees = degree_stats(g);
  if (opt.expose_queries > 0) {
    detail::Stopwatch sw3;
    const auto s = compute_schedule(g.params(), opt.expose.band_depth_override);
    const auto queries = choose_expose_queries(g, s, opt.expose_queries, g.seed());
    rep.expose = expose_audit(g, queries, opt.expose, s, distance_to_center(g));
    rep.timings["expose"] = sw3.seconds();
  }
  if (opt.boundary_xi) {
    detail::Stopwatch sw4;
    rep.boundary = boundary_path_audit(g, *opt.boundary_xi, opt.boundary_K, opt.boundary_K_prime);
    rep.timings["boundary_audit"] = sw4.seconds();
  }
  return rep;
}

inline Graph generate_and_build(const ModelParams& params, std::uint64_t seed, SampleModel model, Builder builder) {
  SampleSet set = model == SampleModel::uniform ? sample_uniform_model(params, seed) : sample_poisson_model(params, seed);
  return builder == Builder::naive ? build_naive(std::move(set)) : build_fast(std::move(set));
}

inline ExperimentReport run_experiment(const ModelParams& params, std::uint64_t seed, SampleModel model,
                                       const RunOptions& opt = {}) {
  detail::Stopwatch sw;
  const Graph g = generate_and_build(params, seed, model, opt.builder);
  const double build = sw.seconds();
  auto rep = analyze_graph(g, opt);
  rep.timings["generate_and_build"] = build;
  return rep;
}

// ---------------------------------------------------------------------------
// JSON

inline json params_json(const ModelParams& p) {
  return json{{"alpha", p.alpha}, {"C", p.C}, {"n", p.n}, {"R", p.R}};
}

inline json to_json(const ExperimentReport& r, bool with_timings = true) {
  json j;
  j["schema"] = kReportSchema;
  j["version"] = kToolVersion;
  j["params"] = params_json(r.params);
  j["seed"] = r.seed;
  j["model"] = to_string(r.model);
  j["builder"] = to_string(r.builder);
  j["vertex_count"] = r.vertex_count;
  j["edge_count"] = r.edge_count;
  j["component_sizes"] = r.stats.sizes;
  j["singletons"] = r.stats.singletons;
  j["giant_size"] = r.stats.giant_size;
  j["giant_diameter"] = {{"value", r.stats.giant_diameter.value}, {"exact", r.stats.giant_diameter.exact}};
  j["second_size"] = r.stats.second_size;
  j["center_clique"] = {{"size", r.stats.center_clique_size}, {"verified", r.stats.center_clique_verified}};
  j["longest_induced_path"] = {{"overall", r.stats.longest_induced_path_overall},
                               {"in_band", r.stats.longest_induced_path_in_band}};
  json slope = nullptr;
  if (std::isfinite(r.degrees.slope)) slope = r.degrees.slope;
  j["degree_tail"] = {{"window", {r.degrees.window_lo, r.degrees.window_hi}}, {"slope", slope},
                      {"mean_degree", r.degrees.mean}};
  if (r.expose) {
    const auto& e = *r.expose;
    j["expose"] = {{"queries", e.queries},
                   {"success", e.success},
                   {"no_path", e.no_path},
                   {"failure", e.failure},
                   {"disagreements", e.disagreements},
                   {"disagreements_connected", e.disagreements_connected},
                   {"invalid_paths", e.invalid_paths}};
  }
  if (r.boundary) {
    const auto& b = *r.boundary;
    j["boundary_audit"] = {{"xi", b.xi},
                           {"K", b.K},
                           {"K_prime", b.K_prime},
                           {"components", b.records.size()},
                           {"max_length", b.max_length},
                           {"max_spread", b.max_spread},
                           {"violations", b.violations}};
  }
  if (with_timings) j["timings"] = r.timings;
  return j;
}

inline json to_json(const ExposeOutcome& o, Vertex q, const BandSchedule& s, const ExposeConfig& cfg) {
  json j;
  j["query"] = q;
  j["verdict"] = to_string(o.verdict);
  j["path"] = o.path;
  j["path_to_center"] = o.path_to_center;
  j["phases"] = o.phase_reached;
  j["max_phases"] = o.max_phases;
  j["vertices_touched"] = o.vertices_touched;
  j["config"] = {{"xi", cfg.xi}, {"epsilon", cfg.epsilon}, {"c_phases", cfg.c_phases},
                 {"window_width", o.window_width}, {"ell0", o.ell0}};
  j["schedule"] = {{"C0", s.C0}, {"i0_raw", s.i0_raw}, {"i0", s.i0}, {"j0", s.j0}, {"c", s.c}, {"T", s.T}};
  j["clamp_notes"] = o.clamp_note;
  json trace = json::array();
  for (const auto& e : o.region_trace) {
    json t{{"phase", e.phase},
           {"ell", e.ell},
           {"R_ell", e.R_ell},
           {"half_width_inner", e.half_width_inner},
           {"half_width_outer", e.half_width_outer},
           {"inner_clamped", e.inner_clamped},
           {"outer_clamped", e.outer_clamped},
           {"exposed", e.exposed},
           {"event", e.event}};
    t["terminal"] = e.terminal ? json(*e.terminal) : json(nullptr);
    trace.push_back(t);
  }
  j["region_trace"] = trace;
  return j;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepConfig {
  std::vector<double> alphas{0.6, 0.75, 0.9};
  double C = 0.0;
  std::vector<std::uint64_t> n_grid;
  std::size_t reps = 1;
  std::uint64_t seed_base = 1;
  SampleModel model = SampleModel::uniform;
  RunOptions run{};
  std::string out_dir = "sweep_out";
  std::size_t threads = 1;

  void validate() const {
    require(!alphas.empty(), "sweep needs at least one alpha");
    require(!n_grid.empty(), "sweep needs a nonempty n grid");
    for (std::size_t i = 1; i < n_grid.size(); ++i) require(n_grid[i - 1] < n_grid[i], "n grid must be strictly increasing");
    require(reps >= 1, "reps must be >= 1");
  }
};

struct SweepCell {
  double alpha = 0.0;
  std::uint64_t n = 0;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
};

/// Canonical description of a cell; its FNV-1a hash names the cell file.
inline json cell_key(const SweepCell& c, const SweepConfig& cfg) {
  const auto& r = cfg.run;
  json k{{"alpha", c.alpha},
         {"C", cfg.C},
         {"n", c.n},
         {"seed", c.seed},
         {"model", to_string(cfg.model)},
         {"builder", to_string(r.builder)},
         {"diameter_cap", r.analysis.diameter_cap},
         {"band", {r.analysis.band.c1, r.analysis.band.c2}},
         {"expose_queries", r.expose_queries},
         {"expose", {r.expose.xi, r.expose.epsilon, r.expose.c_phases}},
         {"version", kToolVersion}};
  k["boundary_xi"] = r.boundary_xi ? json(*r.boundary_xi) : json(nullptr);
  return k;
}

inline std::vector<SweepCell> sweep_cells(const SweepConfig& cfg) {
  std::vector<SweepCell> cells;
  for (double a : cfg.alphas) {
    for (auto n : cfg.n_grid) {
      for (std::size_t rep = 0; rep < cfg.reps; ++rep) cells.push_back({a, n, rep, cfg.seed_base + rep});
    }
  }
  return cells;
}

inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw ValidationError("cannot write " + tmp.string());
    f << content;
    if (!f) throw ValidationError("I/O error writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

/// Worker count from RHG_THREADS, else hardware concurrency.
inline std::size_t default_threads() {
  if (const char* env = std::getenv("RHG_THREADS")) {
    const auto v = parse_int<std::size_t>(env, "RHG_THREADS");
    require(v >= 1, "RHG_THREADS must be >= 1");
    return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

struct SweepResult {
  std::vector<json> cells;  // in cell order
  std::size_t computed = 0;
  std::size_t skipped = 0;
};

/// Runs every cell not already present in out_dir/cells (matched by content
/// hash), then returns all cell reports in grid order.
inline SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  namespace fs = std::filesystem;
  const fs::path cell_dir = fs::path(cfg.out_dir) / "cells";
  fs::create_directories(cell_dir);
  const auto cells = sweep_cells(cfg);
  SweepResult res;
  res.cells.resize(cells.size());
  std::vector<fs::path> paths(cells.size());
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const json key = cell_key(cells[i], cfg);
    paths[i] = cell_dir / (to_hex(fnv1a(key.dump())) + ".json");
    if (fs::exists(paths[i])) {
      std::ifstream f(paths[i]);
      json j = json::parse(f, nullptr, false);
      if (!j.is_discarded() && j.contains("key") && j["key"] == key) {
        res.cells[i] = std::move(j);
        ++res.skipped;
        continue;
      }
    }
    todo.push_back(i);
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::optional<std::string> error;
  auto worker = [&] {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= todo.size()) return;
      const std::size_t i = todo[k];
      try {
        const auto& c = cells[i];
        const auto params = ModelParams::from_n(c.alpha, cfg.C, c.n);
        json j = to_json(run_experiment(params, c.seed, cfg.model, cfg.run), false);
        j["key"] = cell_key(c, cfg);
        write_atomic(paths[i], j.dump(2) + "\n");
        res.cells[i] = std::move(j);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = e.what();
      }
    }
  };
  const std::size_t nthreads = std::max<std::size_t>(1, std::min(cfg.threads, todo.size()));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) throw ValidationError("sweep cell failed: " + *error);
  res.computed = todo.size();
  return res;
}

/// Long-format plot rows (n, alpha, seed, metric, value), sorted by key.
inline std::string plot_csv(const std::vector<json>& reports) {
  using Row = std::tuple<std::uint64_t, double, std::uint64_t, std::string, std::string>;
  std::vector<Row> rows;
  for (const auto& r : reports) {
    const auto n = r["params"]["n"].get<std::uint64_t>();
    const auto a = r["params"]["alpha"].get<double>();
    const auto s = r["seed"].get<std::uint64_t>();
    rows.emplace_back(n, a, s, "giant_diameter", r["giant_diameter"]["value"].dump());
    rows.emplace_back(n, a, s, "second_size", r["second_size"].dump());
    rows.emplace_back(n, a, s, "center_clique_size", r["center_clique"]["size"].dump());
    rows.emplace_back(n, a, s, "longest_induced_path", r["longest_induced_path"]["overall"].dump());
  }
  std::sort(rows.begin(), rows.end());
  std::ostringstream out;
  out << "n,alpha,seed,metric,value\n";
  for (const auto& [n, a, s, m, v] : rows) out << n << ',' << format_decimal(a) << ',' << s << ',' << m << ',' << v << '\n';
  return out.str();
}

inline json sweep_report(const SweepConfig& cfg, const SweepResult& res) {
  json j;
  j["schema"] = "rhg-sweep v1";
  j["version"] = kToolVersion;
  j["alphas"] = cfg.alphas;
  j["C"] = cfg.C;
  j["n_grid"] = cfg.n_grid;
  j["reps"] = cfg.reps;
  j["seed_base"] = cfg.seed_base;
  j["cells"] = res.cells;
  return j;
}

}  // namespace rhg
