#pragma once

// Closed forms for the model measure mu of balls, bands and ball
// intersections, plus a seeded Monte-Carlo oracle that checks them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "geometry.hpp"
#include "params.hpp"
#include "rng.hpp"
#include "sampler.hpp"

namespace rhg {

/// Radial interval times one angular window; a superset of a region used as
/// the Monte-Carlo proposal support.
struct SupportBox {
  double r_lo = 0.0;
  double r_hi = 0.0;
  bool full_circle = true;
  double center = 0.0;
  double half_width = kPi;
};

/// Set algebra over balls, origin bands and cones.
class Region {
 public:
  enum class Kind { ball_origin, ball_at, band_origin, intersection, difference, cone };

  /// A closed angular interval [center - half_width, center + half_width].
  struct Arc {
    double center;
    double half_width;
  };

  static Region ball_origin(double rho) {
    require(rho >= 0.0, "ball radius must be >= 0");
    Region g(Kind::ball_origin);
    g.hi_ = rho;
    return g;
  }
  static Region ball_at(PolarPoint center, double rho) {
    require(rho >= 0.0, "ball radius must be >= 0");
    Region g(Kind::ball_at);
    g.center_ = center;
    g.hi_ = rho;
    return g;
  }
  /// B_O(rho_hi) \ B_O(rho_lo), i.e. rho_lo < r <= rho_hi.
  static Region band_origin(double rho_lo, double rho_hi) {
    require(0.0 <= rho_lo && rho_lo <= rho_hi, "band needs 0 <= rho_lo <= rho_hi");
    Region g(Kind::band_origin);
    g.lo_ = rho_lo;
    g.hi_ = rho_hi;
    return g;
  }
  static Region intersection(std::vector<Region> parts) {
    require(!parts.empty(), "intersection needs at least one region");
    Region g(Kind::intersection);
    g.children_ = std::move(parts);
    return g;
  }
  static Region difference(Region a, Region b) {
    Region g(Kind::difference);
    g.children_ = {std::move(a), std::move(b)};
    return g;
  }
  static Region cone(std::vector<Arc> arcs) {
    for (const auto& a : arcs) require(a.half_width >= 0.0, "cone arcs need nonnegative width");
    Region g(Kind::cone);
    g.arcs_ = std::move(arcs);
    return g;
  }

  Kind kind() const { return kind_; }

  bool contains(const PolarPoint& p) const {
    switch (kind_) {
      case Kind::ball_origin: return p.r <= hi_;
      case Kind::ball_at: return within_distance(p, center_, hi_);
      case Kind::band_origin: return p.r > lo_ && p.r <= hi_;
      case Kind::intersection:
        for (const auto& c : children_) {
          if (!c.contains(p)) return false;
        }
        return true;
      case Kind::difference: return children_[0].contains(p) && !children_[1].contains(p);
      case Kind::cone:
        for (const auto& a : arcs_) {
          if (angular_difference(p.theta, a.center) <= a.half_width) return true;
        }
        return false;
    }
    return false;
  }

  /// A support box containing the region (within the disc of radius R).
  SupportBox support(double R) const { return support_from(R, 0.0); }

 private:
  explicit Region(Kind k) : kind_(k) {}

  // r_floor is a radial lower bound known from an enclosing intersection; it
  // tightens the angular bound of balls.
  SupportBox support_from(double R, double r_floor) const {
    SupportBox box{std::min(R, r_floor), R};
    switch (kind_) {
      case Kind::ball_origin: box.r_hi = std::min(R, hi_); break;
      case Kind::band_origin:
        box.r_lo = std::min(R, std::max(r_floor, lo_));
        box.r_hi = std::min(R, hi_);
        break;
      case Kind::ball_at: {
        box.r_lo = std::min(R, std::max(r_floor, center_.r - hi_));
        box.r_hi = std::min(R, center_.r + hi_);
        // sin^2(dtheta/2) <= (cosh rho - 1) / (2 sinh r_lo sinh r_A) bounds the
        // angular half-width of the ball at every radius >= r_lo.
        if (box.r_lo > 0.0 && center_.r > 0.0) {
          const double bound = (std::cosh(hi_) - 1.0) / (2.0 * std::sinh(box.r_lo)) / std::sinh(center_.r);
          if (bound < 1.0) {
            box.full_circle = false;
            box.center = center_.theta;
            box.half_width = std::min(kPi, 2.0 * std::asin(std::sqrt(bound)) * (1.0 + 1e-9) + 1e-15);
          }
        }
        break;
      }
      case Kind::intersection: {
        double lo = r_floor, hi = R;
        for (const auto& c : children_) {
          const auto cb = c.support_from(R, r_floor);
          lo = std::max(lo, cb.r_lo);
          hi = std::min(hi, cb.r_hi);
        }
        box.r_lo = std::min(R, lo);
        box.r_hi = std::max(box.r_lo, hi);
        for (const auto& c : children_) {
          const auto cb = c.support_from(R, box.r_lo);
          if (!cb.full_circle && (box.full_circle || cb.half_width < box.half_width)) {
            box.full_circle = false;
            box.center = cb.center;
            box.half_width = cb.half_width;
          }
        }
        break;
      }
      case Kind::difference: return children_[0].support_from(R, r_floor);
      case Kind::cone:
        if (arcs_.size() == 1 && arcs_[0].half_width < kPi) {
          box.full_circle = false;
          box.center = arcs_[0].center;
          box.half_width = arcs_[0].half_width;
        }
        break;
    }
    return box;
  }

  Kind kind_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  PolarPoint center_{};
  std::vector<Region> children_;
  std::vector<Arc> arcs_;
};

/// Monte-Carlo estimate with a normal-approximation 99% half-width.
struct McEstimate {
  double mean = 0.0;
  double half_width = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::uint64_t hits = 0;
  /// Measure of the proposal support; 1 when sampling the full disc.
  double support_mass = 1.0;

  bool operator==(const McEstimate&) const = default;
};

inline constexpr double kZ99 = 2.5758293035489004;
inline constexpr std::uint64_t kMcShardSize = 1u << 16;
inline constexpr std::uint64_t kMcMinSamples = 10'000;

struct McOptions {
  /// Sample from the model density restricted to the region's support box
  /// and rescale by the box mass. Off = sample the whole disc.
  bool restrict_support = true;
};

namespace detail {

struct Proposal {
  double u_lo, u_hi;  // radial CDF range
  bool full_circle;
  double theta_lo, width;
  double mass;
};

inline Proposal make_proposal(const SupportBox& box, const ModelParams& params, bool restrict) {
  if (!restrict) return {0.0, 1.0, true, 0.0, kTwoPi, 1.0};
  Proposal p{};
  p.u_lo = radial_cdf(box.r_lo, params);
  p.u_hi = radial_cdf(box.r_hi, params);
  p.full_circle = box.full_circle;
  p.theta_lo = box.full_circle ? 0.0 : box.center - box.half_width;
  p.width = box.full_circle ? kTwoPi : 2.0 * box.half_width;
  p.mass = (p.u_hi - p.u_lo) * (p.width / kTwoPi);
  return p;
}

inline PolarPoint draw(StreamRng& rng, const Proposal& prop, const ModelParams& params) {
  const double ut = rng.uniform();
  const double ur = rng.uniform();
  PolarPoint p;
  p.theta = wrap_angle(prop.theta_lo + prop.width * ut);
  p.r = radial_quantile(prop.u_lo + (prop.u_hi - prop.u_lo) * ur, params);
  if (p.r >= params.R) p.r = std::nextafter(params.R, 0.0);
  return p;
}

}  // namespace detail

/// Hit-frequency estimates for several regions from ONE shared sample stream.
/// Regions must share a support box (the first region's box is used); each
/// result equals what mu_monte_carlo returns for that region alone when the
/// boxes coincide.
inline std::vector<McEstimate> mu_monte_carlo_shared(const std::vector<Region>& regions,
                                                     std::uint64_t samples, std::uint64_t seed,
                                                     const ModelParams& params, const SupportBox& box,
                                                     McOptions opts = {}) {
  require(samples >= kMcMinSamples, "Monte-Carlo needs at least 10^4 samples");
  const auto prop = detail::make_proposal(box, params, opts.restrict_support);
  std::vector<std::uint64_t> hits(regions.size(), 0);
  if (prop.mass > 0.0) {
    const std::uint64_t shards = (samples + kMcShardSize - 1) / kMcShardSize;
    for (std::uint64_t s = 0; s < shards; ++s) {
      StreamRng rng(seed, s);
      const std::uint64_t count = std::min(kMcShardSize, samples - s * kMcShardSize);
      for (std::uint64_t i = 0; i < count; ++i) {
        const PolarPoint p = detail::draw(rng, prop, params);
        for (std::size_t k = 0; k < regions.size(); ++k) hits[k] += regions[k].contains(p) ? 1 : 0;
      }
    }
  }
  std::vector<McEstimate> out;
  for (std::size_t k = 0; k < regions.size(); ++k) {
    McEstimate e;
    e.samples = samples;
    e.seed = seed;
    e.hits = hits[k];
    e.support_mass = prop.mass;
    const double phat = static_cast<double>(hits[k]) / static_cast<double>(samples);
    e.mean = prop.mass * phat;
    e.half_width = prop.mass * kZ99 * std::sqrt(phat * (1.0 - phat) / static_cast<double>(samples));
    out.push_back(e);
  }
  return out;
}

/// mu(region) by hit frequency over points drawn from the model density.
/// Deterministic in (region, samples, seed): shard s of 2^16 samples uses the
/// substream mix(seed, s).
inline McEstimate mu_monte_carlo(const Region& region, std::uint64_t samples, std::uint64_t seed,
                                 const ModelParams& params, McOptions opts = {}) {
  return mu_monte_carlo_shared({region}, samples, seed, params, region.support(params.R), opts)[0];
}

// ---------------------------------------------------------------------------
// Closed forms

inline double mu_ball_origin_exact(double rho, const ModelParams& params) {
  require(rho >= 0.0 && rho <= params.R, "ball radius outside [0, R]");
  return radial_cdf(rho, params);
}

/// Leading term e^{-alpha (R - rho)}.
inline double mu_ball_origin_approx(double rho, const ModelParams& params) {
  require(rho >= 0.0 && rho <= params.R, "ball radius outside [0, R]");
  return std::exp(-params.alpha * (params.R - rho));
}

/// Bound on |exact - approx| for balls at the origin: 3 / (2 (cosh(alpha R) - 1)).
inline double mu_ball_origin_envelope(const ModelParams& params) {
  return 3.0 / (2.0 * (std::cosh(params.alpha * params.R) - 1.0));
}

/// C_alpha = 2 alpha / (pi (alpha - 1/2)).
inline double c_alpha(double alpha) { return 2.0 * alpha / (kPi * (alpha - 0.5)); }

struct ClosedForm {
  double value = 0.0;
  /// Absolute error allowance attached to the asymptotic form.
  double envelope = 0.0;
};

/// mu(B_A(rho_A) cap B_O(rho_O)) for a point A at radius r_A:
/// C_alpha e^{-alpha (R - rho_O) - (rho_O - rho_A + r_A)/2} + O(e^{-alpha (R - rho_A + r_A)}).
///
/// The O-term constant is made explicit from the three terms the derivation
/// drops: the ball B_O(rho_A - r_A) (coefficient 1), the lower integration
/// limit (coefficient C_alpha), and the small-angle correction integrated with
/// K = 4 (coefficient 8 alpha / (pi (3/2 - alpha))).
inline ClosedForm mu_ball_intersection_approx(double r_A, double rho_A, double rho_O,
                                              const ModelParams& params) {
  require(r_A <= rho_A, "ball intersection approximation needs r_A <= rho_A");
  require(rho_O + r_A >= rho_A, "ball intersection approximation needs rho_O + r_A >= rho_A");
  const double a = params.alpha, R = params.R;
  ClosedForm cf;
  cf.value = c_alpha(a) * std::exp(-a * (R - rho_O) - 0.5 * (rho_O - rho_A + r_A));
  const double coeff = 1.0 + c_alpha(a) + 8.0 * a / (kPi * (1.5 - a));
  cf.envelope = coeff * std::exp(-a * (R - rho_A + r_A));
  return cf;
}

/// mu(B_O(rho_hi) \ B_O(rho_lo)), exact.
inline double mu_band_origin(double rho_hi, double rho_lo, const ModelParams& params) {
  require(0.0 <= rho_lo && rho_lo <= rho_hi && rho_hi <= params.R, "band needs 0 <= rho_lo <= rho_hi <= R");
  return radial_cdf(rho_hi, params) - radial_cdf(rho_lo, params);
}

/// e^{-alpha (R - rho_hi)} (1 - e^{-alpha (rho_hi - rho_lo)}), envelope twice
/// the origin-ball bound.
inline ClosedForm mu_band_origin_approx(double rho_hi, double rho_lo, const ModelParams& params) {
  require(0.0 <= rho_lo && rho_lo <= rho_hi && rho_hi <= params.R, "band needs 0 <= rho_lo <= rho_hi <= R");
  const double a = params.alpha;
  return {std::exp(-a * (params.R - rho_hi)) * (1.0 - std::exp(-a * (rho_hi - rho_lo))),
          2.0 * mu_ball_origin_envelope(params)};
}

/// Offsets (c1, c2, c3) of the boundary band (R - c2, R - c1] and the shell
/// width c3 used by the path-component construction.
struct BandOffsets {
  double c1 = 0.2;
  double c2 = 0.3;
  double c3 = 0.1;
};

/// The constants constraint in the form 2 e^{c1 - c2} > e^{c3/2}, with
/// 0 < c3 < c1 < c2.
inline bool offsets_valid(const BandOffsets& c) {
  return 0.0 < c.c3 && c.c3 < c.c1 && c.c1 < c.c2 && 2.0 * std::exp(c.c1 - c.c2) > std::exp(0.5 * c.c3);
}

/// mu((B_A(R) \ B_A(R - c3)) cap (B_O(R - c1) \ B_O(R - c2))) for
/// R - c2 <= r_A <= R - c1. Leading-order closed form
///   2 e^{(R - r_A)/2} (1 - e^{-c3/2}) / (pi C(alpha,R)) * int e^{-r/2} alpha sinh(alpha r) dr,
/// integrated exactly over [R - c2, R - c1]. The envelope propagates the
/// K = 4 small-angle bracket through the difference of the two angles.
inline ClosedForm mu_shell_band(double r_A, const BandOffsets& c, const ModelParams& params) {
  require(0.0 < c.c3 && c.c3 < c.c1 && c.c1 < c.c2, "shell-band form needs 0 < c3 < c1 < c2");
  const double R = params.R, a = params.alpha;
  require(R - c.c2 <= r_A && r_A <= R - c.c1, "shell-band form needs R - c2 <= r_A <= R - c1");
  const double norm = std::cosh(a * R) - 1.0;
  auto antideriv = [a](double r) {
    return 0.5 * a * (std::exp((a - 0.5) * r) / (a - 0.5) + std::exp(-(a + 0.5) * r) / (a + 0.5));
  };
  const double shell = 1.0 - std::exp(-0.5 * c.c3);
  ClosedForm cf;
  cf.value = 2.0 * std::exp(0.5 * (R - r_A)) * shell / (kPi * norm) * (antideriv(R - c.c1) - antideriv(R - c.c2));
  const double rel = 4.0 * std::exp(-R + 2.0 * c.c2) * (1.0 + std::exp(-0.5 * c.c3)) / shell;
  cf.envelope = cf.value * rel;
  return cf;
}

/// The region measured by mu_lens_minus_ball.
inline Region lens_minus_ball_region(const PolarPoint& A, const PolarPoint& B, const BandOffsets& c,
                                     const ModelParams& params) {
  const double R = params.R;
  return Region::difference(
      Region::intersection({Region::ball_at(B, R), Region::band_origin(R - c.c2, R - c.c1),
                            Region::difference(Region::ball_at(B, R), Region::ball_at(B, R - c.c3))}),
      Region::ball_at(A, R));
}

struct LensReport {
  McEstimate estimate;
  /// n * mean: the expected number of vertices in the region.
  double expected_vertices = 0.0;
  /// Closed-form bracket: half and all of the shell-band measure around B.
  double lower = 0.0;
  double upper = 0.0;
};

/// Monte-Carlo measure of [(B_B(R) \ B_B(R - c3)) cap band] \ B_A(R).
inline LensReport mu_lens_minus_ball(const PolarPoint& A, const PolarPoint& B, const BandOffsets& c,
                                     std::uint64_t samples, std::uint64_t seed, const ModelParams& params) {
  require(offsets_valid(c), "offsets violate 0 < c3 < c1 < c2 and 2 e^{c1-c2} > e^{c3/2}");
  const double R = params.R;
  for (double r : {A.r, B.r}) require(R - c.c2 <= r && r <= R - c.c1, "A and B must lie in the band");
  const double d = hyperbolic_distance(A, B);
  require(R - c.c3 <= d && d <= R, "need R - c3 <= d(A, B) <= R");
  LensReport rep;
  rep.estimate = mu_monte_carlo(lens_minus_ball_region(A, B, c, params), samples, seed, params);
  rep.expected_vertices = params.expected_count() * rep.estimate.mean;
  const auto shell = mu_shell_band(B.r, c, params);
  rep.lower = 0.5 * shell.value;
  rep.upper = shell.value;
  return rep;
}

}  // namespace rhg
