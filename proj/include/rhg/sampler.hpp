#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "geometry.hpp"
#include "params.hpp"
#include "rng.hpp"

namespace rhg {

enum class SampleModel { uniform, poisson };

inline const char* to_string(SampleModel m) { return m == SampleModel::uniform ? "uniform" : "poisson"; }

inline SampleModel parse_model(std::string_view s) {
  if (s == "uniform") return SampleModel::uniform;
  if (s == "poisson") return SampleModel::poisson;
  throw ValidationError("unknown model '" + std::string(s) + "'");
}

/// A realized vertex set. Probes are extra vertices drawn or placed on top of
/// the model points; they are excluded from |points| and tagged in files by
/// negative indices.
struct SampleSet {
  std::vector<PolarPoint> points;
  std::vector<PolarPoint> probes;
  SampleModel model = SampleModel::uniform;
  ModelParams params;
  std::uint64_t seed = 0;
  /// How the vertex count was obtained: "fixed", "inversion" or "library".
  std::string count_method = "fixed";

  std::size_t size() const { return points.size() + probes.size(); }
  bool operator==(const SampleSet& o) const {
    return points == o.points && probes == o.probes && model == o.model && params == o.params &&
           seed == o.seed;
  }
};

/// Exact radial CDF (cosh(alpha rho) - 1) / (cosh(alpha R) - 1), evaluated as
/// a ratio of squared sinh terms to avoid cancellation near the origin.
inline double radial_cdf(double rho, const ModelParams& params) {
  if (rho <= 0.0) return 0.0;
  if (rho >= params.R) return 1.0;
  const double q = std::sinh(0.5 * params.alpha * rho) / std::sinh(0.5 * params.alpha * params.R);
  return q * q;
}

/// Inverse of radial_cdf: arccosh(1 + u (cosh(alpha R) - 1)) / alpha.
inline double radial_quantile(double u, const ModelParams& params) {
  require(u >= 0.0 && u <= 1.0, "radial_quantile needs u in [0, 1]");
  if (u == 0.0) return 0.0;
  if (u == 1.0) return params.R;
  const double s = std::sinh(0.5 * params.alpha * params.R);
  const double x = u * 2.0 * s * s;
  const double ach = x < 1e8 ? std::log1p(x + std::sqrt(x * (x + 2.0))) : std::acosh(1.0 + x);
  return std::min(ach / params.alpha, params.R);
}

/// One model vertex from two uniform draws: angle first, then radius.
template <class Rng>
PolarPoint sample_vertex(Rng& rng, const ModelParams& params) {
  const double u_theta = rng.uniform();
  const double u_r = rng.uniform();
  PolarPoint p{radial_quantile(u_r, params), wrap_angle(kTwoPi * u_theta)};
  if (p.r >= params.R) p.r = std::nextafter(params.R, 0.0);
  return p;
}

/// Vertex i of the stream keyed by `seed`; independent of generation order.
inline PolarPoint vertex_at(std::uint64_t seed, std::uint64_t i, const ModelParams& params) {
  StreamRng rng(seed, i);
  return sample_vertex(rng, params);
}

inline std::vector<PolarPoint> sample_points(const ModelParams& params, std::uint64_t seed,
                                             std::uint64_t count) {
  std::vector<PolarPoint> pts(count);
  for (std::uint64_t i = 0; i < count; ++i) pts[i] = vertex_at(seed, i, params);
  return pts;
}

inline SampleSet sample_uniform_model(const ModelParams& params, std::uint64_t seed) {
  SampleSet set;
  set.params = params;
  set.seed = seed;
  set.model = SampleModel::uniform;
  set.points = sample_points(params, seed, params.n);
  return set;
}

/// Poisson(mean) draw. Inversion for mean <= 10, the standard-library
/// sampler otherwise. Returns the count and the method used.
inline std::pair<std::uint64_t, const char*> poisson_count(double mean, std::uint64_t seed) {
  StreamRng rng(seed, kPoissonCountStream);
  if (mean <= 10.0) {
    const double u = rng.uniform();
    double p = std::exp(-mean), cdf = p;
    std::uint64_t k = 0;
    while (u >= cdf && k < 1000) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
    }
    return {k, "inversion"};
  }
  std::poisson_distribution<std::uint64_t> dist(mean);
  return {dist(rng), "library"};
}

/// Poissonized model: N ~ Poisson(n) first, then N vertices from the same
/// per-vertex streams as the uniform model, so N = n reproduces it exactly.
inline SampleSet sample_poisson_model(const ModelParams& params, std::uint64_t seed) {
  SampleSet set;
  set.params = params;
  set.seed = seed;
  set.model = SampleModel::poisson;
  auto [count, method] = poisson_count(params.expected_count(), seed);
  set.count_method = method;
  set.points = sample_points(params, seed, count);
  return set;
}

/// Poisson model conditioned on |P| = count, by rejection over derived seeds.
/// Only meaningful at toy n, where Pr(|P| = count) is not tiny.
inline SampleSet sample_poisson_conditioned(const ModelParams& params, std::uint64_t seed,
                                            std::uint64_t count, std::uint64_t max_attempts) {
  for (std::uint64_t attempt = 0; attempt < max_attempts; ++attempt) {
    const std::uint64_t s = mix(seed, attempt);
    if (poisson_count(params.expected_count(), s).first == count) return sample_poisson_model(params, s);
  }
  throw ValidationError("conditioning by rejection did not succeed within the attempt budget");
}

/// Largest probe count allowed: floor(n^0.45), which keeps m = o(sqrt n).
inline std::uint64_t probe_cap(const ModelParams& params) {
  return static_cast<std::uint64_t>(std::floor(std::pow(static_cast<double>(params.n), 0.45)));
}

inline SampleSet add_probe(SampleSet set, const PolarPoint& probe) {
  require(set.probes.size() + 1 <= probe_cap(set.params), "probe cap n^0.45 exceeded");
  require(probe.r >= 0.0 && probe.r <= set.params.R, "probe radius outside [0, R]");
  set.probes.push_back({probe.r, wrap_angle(probe.theta)});
  return set;
}

/// Appends a probe drawn from the model density (its own substream).
inline SampleSet add_probe(SampleSet set) {
  const auto k = static_cast<std::uint64_t>(set.probes.size());
  StreamRng rng(mix(set.seed, kProbeStream), k);
  const PolarPoint p = sample_vertex(rng, set.params);
  return add_probe(std::move(set), p);
}

// ---------------------------------------------------------------------------
// Points file (TSV)

/// Shortest round-trip decimal form of a double.
inline std::string format_decimal(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::string format_17g(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double parse_double(std::string_view s, const char* what) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ValidationError(std::string("malformed number for ") + what + ": '" + std::string(s) + "'");
  }
  return v;
}

template <class Int>
Int parse_int(std::string_view s, const char* what) {
  Int v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ValidationError(std::string("malformed integer for ") + what + ": '" + std::string(s) + "'");
  }
  return v;
}

inline std::string points_header(const SampleSet& set) {
  const auto& p = set.params;
  return "# rhg-points v1 alpha=" + format_decimal(p.alpha) + " C=" + format_decimal(p.C) +
         " n=" + std::to_string(p.n) + " R=" + format_decimal(p.R) + " seed=" + std::to_string(set.seed) +
         " model=" + to_string(set.model) + " count=" + std::to_string(set.points.size());
}

inline void write_points(const SampleSet& set, std::ostream& out) {
  out << points_header(set) << '\n';
  for (std::size_t i = 0; i < set.points.size(); ++i) {
    out << i << '\t' << format_17g(set.points[i].r) << '\t' << format_17g(set.points[i].theta) << '\n';
  }
  for (std::size_t k = 0; k < set.probes.size(); ++k) {
    out << "-" << (k + 1) << '\t' << format_17g(set.probes[k].r) << '\t' << format_17g(set.probes[k].theta)
        << '\n';
  }
}

namespace detail {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// Parses `key=value` tokens following a fixed magic prefix.
inline std::vector<std::pair<std::string_view, std::string_view>> parse_header_fields(
    std::string_view line, std::string_view magic) {
  if (line.substr(0, magic.size()) != magic) {
    throw ValidationError("unsupported format version or missing header (expected '" + std::string(magic) + "')");
  }
  std::vector<std::pair<std::string_view, std::string_view>> fields;
  for (auto tok : split(line.substr(magic.size()), ' ')) {
    if (tok.empty()) continue;
    const auto eq = tok.find('=');
    if (eq == std::string_view::npos) throw ValidationError("malformed header field '" + std::string(tok) + "'");
    fields.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
  }
  return fields;
}

inline std::string_view field(const std::vector<std::pair<std::string_view, std::string_view>>& fields,
                              std::string_view key) {
  for (const auto& [k, v] : fields) {
    if (k == key) return v;
  }
  throw ValidationError("header is missing field '" + std::string(key) + "'");
}

}  // namespace detail

/// Reads a points file and validates it against its own header: R must equal
/// 2 ln n + C, every radius must lie in [0, R) and every angle in [0, 2 pi).
inline SampleSet read_points(std::istream& in, bool allow_alpha_outside = false) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("points file is empty");
  const auto fields = detail::parse_header_fields(line, "# rhg-points v1 ");
  SampleSet set;
  const double alpha = parse_double(detail::field(fields, "alpha"), "alpha");
  const double C = parse_double(detail::field(fields, "C"), "C");
  const auto n = parse_int<std::uint64_t>(detail::field(fields, "n"), "n");
  const double R = parse_double(detail::field(fields, "R"), "R");
  set.params = ModelParams::from_n(alpha, C, n, allow_alpha_outside);
  if (std::fabs(set.params.R - R) > 1e-12 * std::max(1.0, R)) {
    throw ValidationError("header R does not match 2 ln n + C");
  }
  set.params.R = R;
  set.seed = parse_int<std::uint64_t>(detail::field(fields, "seed"), "seed");
  set.model = parse_model(detail::field(fields, "model"));
  const auto count = parse_int<std::uint64_t>(detail::field(fields, "count"), "count");
  set.points.reserve(count);
  std::int64_t expected_probe = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cols = detail::split(line, '\t');
    if (cols.size() != 3) throw ValidationError("points row must have 3 columns");
    const auto idx = parse_int<std::int64_t>(cols[0], "index");
    const PolarPoint p{parse_double(cols[1], "r"), parse_double(cols[2], "theta")};
    if (!(p.r >= 0.0 && p.r <= R) || !(p.theta >= 0.0 && p.theta < kTwoPi)) {
      throw ValidationError("point coordinates outside the disc at index " + std::to_string(idx));
    }
    if (idx >= 0) {
      if (static_cast<std::uint64_t>(idx) != set.points.size() || !set.probes.empty()) {
        throw ValidationError("point indices must be consecutive from 0");
      }
      if (p.r >= R) throw ValidationError("model point radius must be < R");
      set.points.push_back(p);
    } else {
      if (idx != expected_probe) throw ValidationError("probe indices must run -1, -2, ...");
      --expected_probe;
      set.probes.push_back(p);
    }
  }
  if (set.points.size() != count) {
    throw ValidationError("points file truncated: header count " + std::to_string(count) + ", found " +
                          std::to_string(set.points.size()));
  }
  if (set.model == SampleModel::uniform && count != n) {
    throw ValidationError("uniform model requires count == n");
  }
  return set;
}

}  // namespace rhg
