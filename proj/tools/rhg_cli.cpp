// Command-line front end: generate, build, analyze, expose, measure-check, sweep.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <rhg/rhg.hpp>

namespace {

using namespace rhg;

enum ExitCode { kOk = 0, kValidation = 1, kNumeric = 2 };

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw ValidationError("cannot open '" + path + "' for writing");
  return file;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f;
  open_out(path, f) << text;
}

struct GenerateArgs {
  double alpha = 0.75;
  double C = 0.0;
  std::uint64_t n = 1000;
  std::uint64_t seed = 1;
  std::string model = "uniform";
  std::size_t probes = 0;
  bool allow_alpha = false;
  std::string out;
};

int run_generate(const GenerateArgs& a) {
  const auto params = ModelParams::from_n(a.alpha, a.C, a.n, a.allow_alpha);
  SampleSet set = parse_model(a.model) == SampleModel::uniform ? sample_uniform_model(params, a.seed)
                                                               : sample_poisson_model(params, a.seed);
  for (std::size_t k = 0; k < a.probes; ++k) set = add_probe(std::move(set));
  std::ofstream f;
  write_points(set, open_out(a.out, f));
  return kOk;
}

struct BuildArgs {
  std::string points;
  bool naive = false;
  bool fast = false;
  std::string out;
};

SampleSet load_points(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open points file '" + path + "'");
  return read_points(f);
}

int run_build(const BuildArgs& a) {
  require(!(a.naive && a.fast), "choose one of --naive and --fast");
  auto set = load_points(a.points);
  const Graph g = a.naive ? build_naive(std::move(set)) : build_fast(std::move(set));
  std::ofstream f;
  write_edges(g, open_out(a.out, f));
  return kOk;
}

struct AnalyzeArgs {
  std::string points;
  std::string edges;
  std::string out;
  std::size_t diameter_cap = kExactDiameterCap;
  std::vector<double> band{0.2, 0.3};
  std::size_t expose_queries = 0;
  std::optional<double> boundary_xi;
  double K = 10.0;
  double K_prime = 10.0;
};

int run_analyze(const AnalyzeArgs& a) {
  require(a.band.size() == 2, "--band takes c1,c2");
  const Graph g = load_graph(a.points, a.edges);
  RunOptions opt;
  opt.analysis.diameter_cap = a.diameter_cap;
  opt.analysis.band = {a.band[0], a.band[1]};
  opt.expose_queries = a.expose_queries;
  opt.boundary_xi = a.boundary_xi;
  opt.boundary_K = a.K;
  opt.boundary_K_prime = a.K_prime;
  write_text(a.out, to_json(analyze_graph(g, opt)).dump(2) + "\n");
  return kOk;
}

struct ExposeArgs {
  std::string points;
  std::string edges;
  long long query = 0;
  ExposeConfig cfg;
  std::optional<double> window_width;
  std::optional<int> max_phases;
  std::optional<int> band_depth;
  std::string out;
};

int run_expose(ExposeArgs a) {
  const Graph g = load_graph(a.points, a.edges);
  a.cfg.window_width = a.window_width;
  a.cfg.max_phases = a.max_phases;
  a.cfg.band_depth_override = a.band_depth;
  // Negative indices name probes, as in the points file.
  Vertex q = 0;
  if (a.query < 0) {
    const auto k = static_cast<std::size_t>(-a.query - 1);
    require(k < g.sample().probes.size(), "no such probe");
    q = static_cast<Vertex>(g.sample().points.size() + k);
  } else {
    require(static_cast<std::size_t>(a.query) < g.sample().points.size(), "no such vertex");
    q = static_cast<Vertex>(a.query);
  }
  const auto s = compute_schedule(g.params(), a.band_depth);
  json j;
  if (g.radius(q) > s.outer(s.i0)) {
    j = to_json(expose(g, q, a.cfg, s), q, s, a.cfg);
  } else {
    // Inside B_O(R_{i0}) the query descends directly.
    const auto path = descend_inner(g, q, s);
    j["query"] = q;
    j["verdict"] = path ? "success" : "failure";
    j["path"] = path.value_or(std::vector<Vertex>{});
    j["path_to_center"] = j["path"];
    j["phases"] = 0;
    j["region_trace"] = json::array();
    j["clamp_notes"] = s.clamp_note;
    j["route"] = "descend_inner";
  }
  write_text(a.out, j.dump(2) + "\n");
  return kOk;
}

struct MeasureArgs {
  std::uint64_t samples = 10'000'000;
  std::uint64_t seed = 1;
  std::string out;
};

int run_measure(const MeasureArgs& a) {
  std::ostringstream csv;
  csv << "region_id,closed_form,mc_mean,mc_halfwidth,envelope,pass\n";
  bool all = true;
  for (const auto& c : standard_measure_grid(a.samples, a.seed)) {
    csv << c.region_id << ',' << format_17g(c.closed_form) << ',' << format_17g(c.mc.mean) << ','
        << format_17g(c.mc.half_width) << ',' << format_17g(c.envelope) << ',' << (c.pass ? "true" : "false")
        << '\n';
    all = all && c.pass;
  }
  write_text(a.out, csv.str());
  if (!all) std::cerr << "measure-check: at least one row failed\n";
  return kOk;
}

struct SweepArgs {
  std::vector<double> alphas{0.6, 0.75, 0.9};
  double C = 0.0;
  std::vector<std::uint64_t> n_grid;
  std::size_t reps = 1;
  std::uint64_t seed_base = 1;
  std::string model = "uniform";
  std::string builder = "fast";
  std::size_t diameter_cap = kExactDiameterCap;
  std::vector<double> band{0.2, 0.3};
  std::size_t expose_queries = 0;
  std::optional<double> boundary_xi;
  std::optional<int> band_depth;
  std::string out_dir = "sweep_out";
  std::size_t threads = 0;
};

int run_sweep_cmd(const SweepArgs& a) {
  require(a.band.size() == 2, "--band takes c1,c2");
  require(a.builder == "fast" || a.builder == "naive", "--builder must be fast or naive");
  SweepConfig cfg;
  cfg.alphas = a.alphas;
  cfg.C = a.C;
  cfg.n_grid = a.n_grid;
  cfg.reps = a.reps;
  cfg.seed_base = a.seed_base;
  cfg.model = parse_model(a.model);
  cfg.run.builder = a.builder == "naive" ? Builder::naive : Builder::fast;
  cfg.run.analysis.diameter_cap = a.diameter_cap;
  cfg.run.analysis.band = {a.band[0], a.band[1]};
  cfg.run.expose_queries = a.expose_queries;
  cfg.run.expose.band_depth_override = a.band_depth;
  cfg.run.boundary_xi = a.boundary_xi;
  cfg.out_dir = a.out_dir;
  cfg.threads = a.threads > 0 ? a.threads : default_threads();
  const auto res = run_sweep(cfg);
  namespace fs = std::filesystem;
  write_atomic(fs::path(cfg.out_dir) / "report.json", sweep_report(cfg, res).dump(2) + "\n");
  write_atomic(fs::path(cfg.out_dir) / "plot.csv", plot_csv(res.cells));
  std::cerr << "sweep: " << res.cells.size() << " cells (" << res.computed << " computed, " << res.skipped
            << " reused)\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random hyperbolic graph laboratory"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "sample a vertex set");
  g->add_option("--alpha", gen.alpha, "model exponent")->capture_default_str();
  g->add_option("--C", gen.C, "radius offset, R = 2 ln n + C")->capture_default_str();
  g->add_option("--n", gen.n, "vertex count")->capture_default_str();
  g->add_option("--seed", gen.seed)->capture_default_str();
  g->add_option("--model", gen.model, "uniform or poisson")->capture_default_str();
  g->add_option("--probes", gen.probes, "extra probe vertices drawn from the model");
  g->add_flag("--allow-alpha", gen.allow_alpha, "accept alpha outside (1/2, 1) with a warning");
  g->add_option("--out", gen.out, "points file (default stdout)");

  BuildArgs build;
  auto* b = app.add_subcommand("build", "build the edge set of a points file");
  b->add_option("--points", build.points)->required();
  b->add_flag("--fast", build.fast, "angular sweep builder (default)");
  b->add_flag("--naive", build.naive, "all-pairs builder");
  b->add_option("--out", build.out, "edge file (default stdout)");

  AnalyzeArgs an;
  auto* a = app.add_subcommand("analyze", "structural report of a graph bundle");
  a->add_option("--points", an.points)->required();
  a->add_option("--edges", an.edges)->required();
  a->add_option("--out", an.out, "JSON report (default stdout)");
  a->add_option("--diameter-cap", an.diameter_cap)->capture_default_str();
  a->add_option("--band", an.band, "c1,c2 for band-restricted path hunting")->delimiter(',');
  a->add_option("--expose-queries", an.expose_queries, "run Expose on this many vertices");
  a->add_option("--boundary-xi", an.boundary_xi, "run the boundary-path audit with this margin");
  a->add_option("--K", an.K)->capture_default_str();
  a->add_option("--K-prime", an.K_prime)->capture_default_str();

  ExposeArgs ex;
  auto* e = app.add_subcommand("expose", "run Expose from one query vertex");
  e->add_option("--points", ex.points)->required();
  e->add_option("--edges", ex.edges)->required();
  e->add_option("--query", ex.query, "vertex index; -k for the k-th probe")->required();
  e->add_option("--xi", ex.cfg.xi)->capture_default_str();
  e->add_option("--epsilon", ex.cfg.epsilon)->capture_default_str();
  e->add_option("--c-phases", ex.cfg.c_phases, "phase count factor C''")->capture_default_str();
  e->add_option("--window-width", ex.window_width);
  e->add_option("--max-phases", ex.max_phases);
  e->add_option("--band-depth", ex.band_depth, "replace the clamped i0");
  e->add_option("--out", ex.out, "JSON trace (default stdout)");

  MeasureArgs me;
  auto* m = app.add_subcommand("measure-check", "closed forms against the Monte-Carlo oracle");
  m->add_option("--samples", me.samples)->capture_default_str();
  m->add_option("--seed", me.seed)->capture_default_str();
  m->add_option("--out", me.out, "CSV (default stdout)");

  SweepArgs sw;
  auto* s = app.add_subcommand("sweep", "multi-n experiment grid with resumable cells");
  s->add_option("--alpha", sw.alphas, "alpha list")->delimiter(',');
  s->add_option("--C", sw.C)->capture_default_str();
  s->add_option("--n-grid", sw.n_grid, "strictly increasing n list")->delimiter(',')->required();
  s->add_option("--reps", sw.reps)->capture_default_str();
  s->add_option("--seed-base", sw.seed_base)->capture_default_str();
  s->add_option("--model", sw.model)->capture_default_str();
  s->add_option("--builder", sw.builder)->capture_default_str();
  s->add_option("--diameter-cap", sw.diameter_cap)->capture_default_str();
  s->add_option("--band", sw.band)->delimiter(',');
  s->add_option("--expose-queries", sw.expose_queries);
  s->add_option("--boundary-xi", sw.boundary_xi);
  s->add_option("--band-depth", sw.band_depth);
  s->add_option("--out-dir", sw.out_dir)->capture_default_str();
  s->add_option("--threads", sw.threads, "worker count (default RHG_THREADS or all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kValidation;
  }

  try {
    if (*g) return run_generate(gen);
    if (*b) return run_build(build);
    if (*a) return run_analyze(an);
    if (*e) return run_expose(ex);
    if (*m) return run_measure(me);
    if (*s) return run_sweep_cmd(sw);
  } catch (const NumericHealthError& err) {
    std::cerr << "numeric health error: " << err.what() << '\n';
    return kNumeric;
  } catch (const ValidationError& err) {
    std::cerr << "validation error: " << err.what() << '\n';
    return kValidation;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kValidation;
  }
  return kOk;
}
