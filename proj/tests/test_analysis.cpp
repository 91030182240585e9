#include <gtest/gtest.h>

#include <deque>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include <rhg/analysis.hpp>

#include "oracles.hpp"

using namespace rhg;

namespace {

using EdgeList = std::vector<std::pair<Vertex, Vertex>>;

Graph toy(std::size_t n, EdgeList edges, double R = 30.0) {
  std::vector<PolarPoint> pts(n, PolarPoint{R - 0.5, 0.0});
  for (std::size_t i = 0; i < n; ++i) pts[i].theta = 0.01 * static_cast<double>(i);
  return oracle::toy_graph(ModelParams::from_radius(0.75, R), pts, std::move(edges));
}

EdgeList path_edges(Vertex from, Vertex count) {
  EdgeList e;
  for (Vertex i = 0; i + 1 < count; ++i) e.emplace_back(from + i, from + i + 1);
  return e;
}

// Plain queue BFS, one source.
std::vector<int> flood(const Graph& g, Vertex s) {
  std::vector<int> d(g.vertex_count(), -1);
  std::deque<Vertex> q{s};
  d[s] = 0;
  while (!q.empty()) {
    const Vertex u = q.front();
    q.pop_front();
    for (Vertex v : g.neighbors(u)) {
      if (d[v] < 0) {
        d[v] = d[u] + 1;
        q.push_back(v);
      }
    }
  }
  return d;
}

// A connected vertex set induces a path iff from some vertex every BFS layer
// inside the set has exactly one vertex.
bool is_path_by_layers(const Graph& g, const std::vector<Vertex>& comp) {
  for (Vertex x : comp) {
    const auto d = flood(g, x);
    std::map<int, int> layer;
    for (Vertex v : comp) ++layer[d[v]];
    bool ok = true;
    for (const auto& [k, c] : layer) ok = ok && c == 1;
    if (ok) return true;
  }
  return false;
}

Graph sparse_graph(std::uint64_t seed, std::uint64_t n = 3000) {
  // alpha near 1 and negative C give many small components
  return build_fast(sample_uniform_model(ModelParams::from_n(0.9, -1.0, n), seed));
}

}  // namespace

TEST(UnionFind, Basic) {
  UnionFind uf(6);
  uf.unite(0, 1);
  uf.unite(2, 3);
  uf.unite(1, 3);
  EXPECT_EQ(uf.find(0), uf.find(2));
  EXPECT_NE(uf.find(0), uf.find(4));
  uf.unite(0, 2);
  EXPECT_NE(uf.find(5), uf.find(4));
}

TEST(Components, ToyPartition) {
  const auto g = toy(7, {{0, 3}, {3, 5}, {1, 2}});
  const auto c = connected_components(g);
  ASSERT_EQ(c.members.size(), 4u);
  EXPECT_EQ(c.members[0], (std::vector<Vertex>{0, 3, 5}));
  EXPECT_EQ(c.members[1], (std::vector<Vertex>{1, 2}));
  EXPECT_EQ(c.members[2], (std::vector<Vertex>{4}));
  EXPECT_EQ(c.members[3], (std::vector<Vertex>{6}));
  EXPECT_EQ(c.id, (std::vector<Vertex>{0, 1, 1, 0, 4, 0, 6}));
  EXPECT_EQ(c.index_of(4), 2u);
  EXPECT_EQ(c.by_size(), (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(Components, AgreesWithFlood) {
  for (std::uint64_t seed : {1, 2}) {
    const auto g = sparse_graph(seed);
    const auto c = connected_components(g);
    ASSERT_GT(c.members.size(), 10u);
    std::size_t total = 0;
    for (const auto& m : c.members) {
      total += m.size();
      ASSERT_TRUE(std::is_sorted(m.begin(), m.end()));
      const auto d = flood(g, m.front());
      std::size_t reached = 0;
      for (Vertex v = 0; v < g.vertex_count(); ++v) {
        if (d[v] >= 0) {
          ++reached;
          ASSERT_EQ(c.id[v], m.front());
        }
      }
      ASSERT_EQ(reached, m.size());
    }
    EXPECT_EQ(total, g.vertex_count());
    for (const auto& [u, v] : g.edges()) ASSERT_EQ(c.id[u], c.id[v]);
  }
}

TEST(Bfs, MultiSourceAndMask) {
  const auto g = toy(6, path_edges(0, 6));
  const auto d = bfs_distances(g, {0, 5});
  EXPECT_EQ(d, (std::vector<std::uint32_t>{0, 1, 2, 2, 1, 0}));
  std::vector<char> allowed{1, 1, 0, 1, 1, 1};
  const auto m = bfs_distances(g, {0}, &allowed);
  EXPECT_EQ(m[1], 1u);
  EXPECT_EQ(m[2], kUnreachable);
  EXPECT_EQ(m[5], kUnreachable);
}

TEST(Diameter, Toys) {
  {
    const auto g = toy(5, path_edges(0, 5));
    EXPECT_EQ(component_diameter(g, {0, 1, 2, 3, 4}, DiameterMode::exact).value, 4u);
    EXPECT_EQ(component_diameter(g, {0, 1, 2, 3, 4}, DiameterMode::double_sweep).value, 4u);
  }
  {
    EdgeList e = path_edges(0, 6);
    e.emplace_back(0, 5);
    const auto g = toy(6, e);
    EXPECT_EQ(component_diameter(g, {0, 1, 2, 3, 4, 5}, DiameterMode::exact).value, 3u);
  }
  {
    const auto g = toy(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
    EXPECT_EQ(component_diameter(g, {0, 1, 2, 3, 4}, DiameterMode::exact).value, 2u);
  }
  const auto g = toy(1, {});
  const auto one = component_diameter(g, {0}, DiameterMode::exact);
  EXPECT_EQ(one.value, 0u);
  EXPECT_TRUE(one.exact);
}

TEST(Diameter, ExactMatchesAllPairsFlood) {
  for (std::uint64_t seed : {3, 4, 5}) {
    const auto g = build_fast(sample_uniform_model(ModelParams::from_n(0.75, 0.0, 1500), seed));
    const auto c = connected_components(g);
    for (const auto& m : c.members) {
      if (m.size() < 2) continue;
      int truth = 0;
      for (Vertex s : m) {
        const auto d = flood(g, s);
        for (Vertex v : m) truth = std::max(truth, d[v]);
      }
      const auto exact = component_diameter(g, m, DiameterMode::exact);
      ASSERT_EQ(static_cast<int>(exact.value), truth);
      ASSERT_TRUE(exact.exact);
      const auto lb = component_diameter(g, m, DiameterMode::double_sweep);
      ASSERT_FALSE(lb.exact);
      ASSERT_LE(lb.value, exact.value);
      ASSERT_GE(2 * lb.value, exact.value);
    }
  }
}

TEST(Diameter, CapAndAuto) {
  const auto g = toy(10, path_edges(0, 10));
  std::vector<Vertex> all(10);
  std::iota(all.begin(), all.end(), 0);
  EXPECT_THROW(component_diameter(g, all, DiameterMode::exact, 5), ValidationError);
  const auto a = component_diameter_auto(g, all, 5);
  EXPECT_FALSE(a.exact);
  EXPECT_EQ(a.value, 9u);
  EXPECT_TRUE(component_diameter_auto(g, all, 10).exact);
}

TEST(CenterClique, SizeMatchesExactExpectation) {
  const auto p = ModelParams::from_n(0.75, 0.0, 4096);
  const double q = (std::cosh(0.75 * p.R / 2) - 1.0) / (std::cosh(0.75 * p.R) - 1.0);
  EXPECT_NEAR(expected_clique_size(p), 4096 * q, 1e-9 * 4096 * q);
  double sum = 0.0;
  const int seeds = 50;
  for (int s = 0; s < seeds; ++s) {
    const auto g = build_fast(sample_uniform_model(p, 300 + s));
    const auto clique = center_clique(g);
    ASSERT_TRUE(verify_clique(g, clique));
    sum += static_cast<double>(clique.size());
  }
  const double se = std::sqrt(4096 * q * (1 - q) / seeds);
  EXPECT_LE(std::fabs(sum / seeds - 4096 * q), 4 * se);
}

TEST(CenterClique, ExpectationTracksPowerLaw) {
  for (double alpha : {0.6, 0.75, 0.9}) {
    for (double C : {-1.0, 0.0, 1.0}) {
      for (int k = 12; k <= 20; ++k) {
        const auto p = ModelParams::from_n(alpha, C, 1ull << k);
        const double leading = std::pow(static_cast<double>(p.n), 1 - alpha) * std::exp(-alpha * C / 2);
        EXPECT_NEAR(expected_clique_size(p) / leading, 1.0, 0.02) << alpha << " " << C << " " << k;
      }
    }
  }
}

TEST(CenterClique, VerifyDetectsMissingEdge) {
  const auto g = toy(3, {{0, 1}, {1, 2}});
  EXPECT_FALSE(verify_clique(g, {0, 1, 2}));
  EXPECT_TRUE(verify_clique(g, {0, 1}));
}

TEST(DistanceToCenter, FiniteIffSharesComponentWithCenter) {
  const auto g = build_fast(sample_uniform_model(ModelParams::from_n(0.75, 0.0, 5000), 12));
  const auto c = connected_components(g);
  const auto clique = center_clique(g);
  ASSERT_FALSE(clique.empty());
  const auto d = distance_to_center(g);
  std::set<Vertex> center_comps;
  for (Vertex v : clique) {
    EXPECT_EQ(d[v], 0u);
    center_comps.insert(c.id[v]);
  }
  EXPECT_EQ(center_comps.size(), 1u);
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    ASSERT_EQ(d[v] != kUnreachable, center_comps.count(c.id[v]) == 1);
  }
  // spot-check values against single-source floods
  for (Vertex v = 0; v < g.vertex_count(); v += 97) {
    if (d[v] == kUnreachable) continue;
    const auto f = flood(g, v);
    int best = std::numeric_limits<int>::max();
    for (Vertex x : clique) best = std::min(best, f[x]);
    ASSERT_EQ(static_cast<int>(d[v]), best);
  }
}

TEST(InducedPaths, Toys) {
  // components: path 0-1-2-3, star 4-{5,6,7}, triangle 8-9-10, singleton 11,
  // edge 12-13, path with chord 14..17
  EdgeList e = path_edges(0, 4);
  e.insert(e.end(), {{4, 5}, {4, 6}, {4, 7}, {8, 9}, {9, 10}, {8, 10}, {12, 13}});
  auto chord = path_edges(14, 4);
  chord.emplace_back(14, 16);
  e.insert(e.end(), chord.begin(), chord.end());
  const auto g = toy(18, e);
  const auto c = connected_components(g);
  const auto rep = induced_path_components(g, c);
  ASSERT_EQ(rep.paths.size(), 3u);
  EXPECT_EQ(rep.paths[0].vertices, (std::vector<Vertex>{0, 1, 2, 3}));
  EXPECT_EQ(rep.paths[1].vertices, (std::vector<Vertex>{11}));
  EXPECT_EQ(rep.paths[2].vertices, (std::vector<Vertex>{12, 13}));
  EXPECT_EQ(rep.singletons, 1u);
  EXPECT_EQ(rep.longest_overall, 3u);
  EXPECT_EQ(rep.longest_in_band, 0u);
  EXPECT_FALSE(rep.band_requested);
  for (const auto& p : rep.paths) EXPECT_TRUE(verify_induced_path(g, c, p.vertices));
  EXPECT_FALSE(verify_induced_path(g, c, {0, 1, 2}));
  EXPECT_FALSE(verify_induced_path(g, c, {8, 9, 10}));
  EXPECT_FALSE(verify_induced_path(g, c, {}));
}

TEST(InducedPaths, PathStartingInTheMiddleOfTheIndexOrder) {
  // path 2-0-3-1: the lowest index is interior
  const auto g = toy(4, {{2, 0}, {0, 3}, {3, 1}});
  const auto c = connected_components(g);
  const auto rep = induced_path_components(g, c);
  ASSERT_EQ(rep.paths.size(), 1u);
  EXPECT_EQ(rep.paths[0].length(), 3u);
  EXPECT_TRUE(verify_induced_path(g, c, rep.paths[0].vertices));
}

TEST(InducedPaths, BandMembership) {
  const double R = 30.0;
  std::vector<PolarPoint> pts{{R - 0.25, 0.0}, {R - 0.22, 0.1}, {R - 0.28, 0.2}, {R - 0.5, 1.0}, {R - 0.25, 1.1}};
  const auto g = oracle::toy_graph(ModelParams::from_radius(0.75, R), pts, {{0, 1}, {1, 2}, {3, 4}});
  const auto c = connected_components(g);
  const auto rep = induced_path_components(g, c, PathBand{});
  ASSERT_EQ(rep.paths.size(), 2u);
  EXPECT_TRUE(rep.paths[0].in_band);
  EXPECT_FALSE(rep.paths[1].in_band);
  EXPECT_EQ(rep.longest_in_band, 2u);
  EXPECT_EQ(rep.longest_overall, 2u);
}

TEST(InducedPaths, ExhaustiveOracleOnSampledGraphs) {
  for (std::uint64_t seed : {6, 7, 8}) {
    const auto g = sparse_graph(seed);
    const auto c = connected_components(g);
    const auto rep = induced_path_components(g, c, PathBand{});
    std::set<Vertex> reported;
    for (const auto& p : rep.paths) {
      ASSERT_TRUE(verify_induced_path(g, c, p.vertices));
      if (p.in_band) {
        for (Vertex v : p.vertices) ASSERT_GE(g.radius(v), g.params().R - 0.3);
      }
      reported.insert(c.id[p.vertices.front()]);
    }
    for (const auto& m : c.members) {
      if (m.size() > 200) continue;
      ASSERT_EQ(is_path_by_layers(g, m), reported.count(m.front()) == 1) << "component " << m.front();
    }
  }
}

TEST(DegreeStats, HistogramAndCcdf) {
  const auto g = toy(5, {{0, 1}, {0, 2}, {0, 3}, {1, 2}});
  const auto s = degree_stats(g, std::make_pair<std::size_t, std::size_t>(1, 3));
  EXPECT_EQ(s.histogram, (std::vector<std::uint64_t>{1, 1, 2, 1}));
  EXPECT_EQ(s.ccdf, (std::vector<double>{1.0, 0.8, 0.6, 0.2}));
  EXPECT_DOUBLE_EQ(s.mean, 8.0 / 5.0);
  // least-squares slope of (log 1, log .8), (log 2, log .6), (log 3, log .2)
  const std::vector<double> x{0.0, std::log(2.0), std::log(3.0)}, y{std::log(0.8), std::log(0.6), std::log(0.2)};
  const double mx = (x[0] + x[1] + x[2]) / 3, my = (y[0] + y[1] + y[2]) / 3;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < 3; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  EXPECT_NEAR(s.slope, sxy / sxx, 1e-12);
  EXPECT_TRUE(std::isnan(degree_stats(g, std::make_pair<std::size_t, std::size_t>(3, 3)).slope));
}

TEST(DegreeStats, PowerLawTailSlope) {
  // ccdf exponent -(2 alpha) in the tail; loose gate at desk scale
  const auto g = build_fast(sample_uniform_model(ModelParams::from_n(0.75, 0.0, 20000), 3));
  const auto s = degree_stats(g);
  std::uint64_t total = 0;
  for (auto h : s.histogram) total += h;
  EXPECT_EQ(total, g.vertex_count());
  EXPECT_DOUBLE_EQ(s.ccdf[0], 1.0);
  EXPECT_EQ(s.window_lo, static_cast<std::size_t>(std::ceil(2 * s.mean)));
  EXPECT_LT(s.slope, -0.5);
  EXPECT_GT(s.slope, -3.0);
}

TEST(ComponentStats, Invariants) {
  for (double alpha : {0.6, 0.75, 0.9}) {
    const auto g = build_fast(sample_uniform_model(ModelParams::from_n(alpha, 0.0, 4000), 21));
    const auto c = connected_components(g);
    AnalysisOptions opt;
    opt.giant_only_diameter = false;
    const auto s = component_stats(g, c, opt);
    std::size_t total = 0;
    for (auto x : s.sizes) total += x;
    EXPECT_EQ(total, g.vertex_count());
    EXPECT_TRUE(std::is_sorted(s.sizes.rbegin(), s.sizes.rend()));
    EXPECT_EQ(s.giant_size, s.sizes[0]);
    EXPECT_EQ(s.second_size, s.sizes[1]);
    EXPECT_EQ(s.singletons, static_cast<std::size_t>(std::count(s.sizes.begin(), s.sizes.end(), 1u)));
    if (s.center_clique_size > 0) {
      EXPECT_GE(s.giant_size, s.center_clique_size);
    }
    EXPECT_TRUE(s.center_clique_verified);
    EXPECT_TRUE(s.giant_diameter.exact);
    EXPECT_EQ(s.other_diameters.size(), s.sizes.size() - 1);
    EXPECT_GE(s.longest_induced_path_overall, s.longest_induced_path_in_band);
  }
}
