#pragma once

// Hyperbolic-plane primitives in native polar coordinates.
//
// Every distance comparison goes through one canonical evaluation,
//   sin^2(dtheta/2) <= (cosh(rho) - cosh(r_u - r_v)) / (2 sinh r_u sinh r_v),
// which is the cosine law rewritten with 1 - cos x = 2 sin^2(x/2). The
// rewrite keeps full relative precision for the tiny angles that occur near
// the boundary and never forms cosh(r_u) * cosh(r_v), so it cannot overflow
// for R <= 700.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <string>

#include "error.hpp"
#include "params.hpp"

namespace rhg {

struct PolarPoint {
  double r = 0.0;
  double theta = 0.0;

  bool operator==(const PolarPoint&) const = default;
};

/// Counts of arccos/arccosh arguments pulled back into their domain.
struct ClampTally {
  std::atomic<std::uint64_t> acos_clamps{0};
  std::atomic<std::uint64_t> acosh_clamps{0};

  void reset() {
    acos_clamps = 0;
    acosh_clamps = 0;
  }
};

inline ClampTally& clamp_tally() {
  static ClampTally tally;
  return tally;
}

inline constexpr double kClampTolerance = 1e-9;

namespace detail {

// Clamps a quantity that must be nonnegative. `scale` is the magnitude the
// quantity is compared against; the relative violation must stay below the
// tolerance.
inline double clamp_nonnegative(double x, double scale, std::atomic<std::uint64_t>& counter,
                                const char* what) {
  if (x >= 0.0) return x;
  if (-x > kClampTolerance * std::max(1.0, scale)) {
    throw NumericHealthError(std::string("clamp beyond tolerance in ") + what);
  }
  counter.fetch_add(1, std::memory_order_relaxed);
  return 0.0;
}

/// log(sinh x) for x > 0 without overflow.
inline double log_sinh(double x) {
  return x - std::log(2.0) + std::log1p(-std::exp(-2.0 * x));
}

/// The canonical within-distance test. Arguments must already be in
/// canonical order (a >= b). `sinh_a`, `sinh_b` are std::sinh of a and b.
inline bool within_canonical(double a, double sinh_a, double b, double sinh_b, double dtheta,
                             double rho, double cosh_rho) {
  if (a + b <= rho) return true;
  if (b == 0.0) return a <= rho;
  const double s = std::sin(0.5 * dtheta);
  const double bound = (cosh_rho - std::cosh(a - b)) / (2.0 * sinh_a) / sinh_b;
  return s * s <= bound;
}

}  // namespace detail

/// Smallest angle between two directions, in [0, pi].
inline double angular_difference(double t1, double t2) {
  double d = std::fmod(std::fabs(t1 - t2), kTwoPi);
  return std::min(d, kTwoPi - d);
}

/// Reduces an angle into [0, 2 pi).
inline double wrap_angle(double t) {
  double w = std::fmod(t, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

/// Hyperbolic distance from the cosine law. Symmetric by construction:
/// the radii are put in canonical order before evaluation.
inline double hyperbolic_distance(const PolarPoint& p, const PolarPoint& q) {
  double a = p.r, b = q.r;
  if (a < b) std::swap(a, b);
  if (b == 0.0) return a;
  const double dtheta = angular_difference(p.theta, q.theta);
  const double s = std::sin(0.5 * dtheta);
  if (s == 0.0) return a - b;
  if (a + b < 600.0) {
    const double x = std::cosh(a - b) + 2.0 * s * s * std::sinh(a) * std::sinh(b);
    return std::acosh(std::max(1.0, x));
  }
  // log-space: cosh d = cosh(a-b) + e^{t}, d = log(X) + log(1 + sqrt(1 - X^-2))
  const double t = std::log(2.0) + 2.0 * std::log(s) + detail::log_sinh(a) + detail::log_sinh(b);
  const double lc = (a - b) - std::log(2.0) + std::log1p(std::exp(-2.0 * (a - b)));
  const double hi = std::max(t, lc), lo = std::min(t, lc);
  const double log_x = hi + std::log1p(std::exp(lo - hi));
  return log_x + std::log1p(std::sqrt(-std::expm1(-2.0 * log_x)));
}

/// True iff d(p, q) <= rho, decided by the canonical comparison.
inline bool within_distance(const PolarPoint& p, const PolarPoint& q, double rho) {
  const PolarPoint& hi = (p.r >= q.r) ? p : q;
  const PolarPoint& lo = (p.r >= q.r) ? q : p;
  return detail::within_canonical(hi.r, std::sinh(hi.r), lo.r, std::sinh(lo.r),
                                  angular_difference(p.theta, q.theta), rho, std::cosh(rho));
}

/// The model's edge rule: d(u, v) <= R.
inline bool is_edge(const PolarPoint& u, const PolarPoint& v, const ModelParams& params) {
  return within_distance(u, v, params.R);
}

/// Angle at the origin of the triangle with sides a, b from the origin and
/// opposite side c. Evaluated as 2 atan2(sqrt(cosh c - cosh(a-b)),
/// sqrt(cosh(a+b) - cosh c)), which is exact at both ends of the range.
inline double angle_at_origin(double a, double b, double c) {
  require(a > 0.0 && b > 0.0, "angle_at_origin needs positive sides a, b");
  require(c >= 0.0, "angle_at_origin needs c >= 0");
  const double ch = std::cosh(c);
  const double denom = 2.0 * std::sinh(a) * std::sinh(b);
  auto& tally = clamp_tally().acos_clamps;
  double lo = ch - std::cosh(a - b);
  double hi = std::cosh(a + b) - ch;
  if (lo < 0.0 && -lo > kClampTolerance * denom) {
    throw ValidationError("angle_at_origin: c < |a - b|");
  }
  if (hi < 0.0 && -hi > kClampTolerance * denom) {
    throw ValidationError("angle_at_origin: c > a + b");
  }
  lo = detail::clamp_nonnegative(lo, denom, tally, "angle_at_origin");
  hi = detail::clamp_nonnegative(hi, denom, tally, "angle_at_origin");
  return 2.0 * std::atan2(std::sqrt(lo), std::sqrt(hi));
}

/// Leading term 2 e^{(c - a - b)/2} of the small-angle expansion.
inline double angle_approx(double a, double b, double c) {
  require(a >= 0.0 && b >= 0.0, "angle_approx needs nonnegative sides");
  require(std::min(a, b) <= c && c <= a + b, "angle_approx needs min(a,b) <= c <= a+b");
  return 2.0 * std::exp(0.5 * (c - a - b));
}

/// Exact angle against its leading term. `bracket` is the observed constant
/// K in |exact - approx| / approx = K e^{c-a-b}.
struct AngleApproxReport {
  double exact = 0.0;
  double approx = 0.0;
  double relative_error = 0.0;
  double bracket = 0.0;
};

inline AngleApproxReport angle_approx_report(double a, double b, double c) {
  AngleApproxReport rep;
  rep.approx = angle_approx(a, b, c);
  rep.exact = angle_at_origin(a, b, c);
  rep.relative_error = (rep.exact - rep.approx) / rep.approx;
  rep.bracket = std::fabs(rep.relative_error) / std::exp(c - a - b);
  return rep;
}

/// Largest angular difference at which radii r_u, r_v are within distance
/// rho; pi when every angle qualifies.
inline double max_angle_within(double r_u, double r_v, double rho) {
  double a = r_u, b = r_v;
  if (a < b) std::swap(a, b);
  if (a + b <= rho || b == 0.0) return kPi;
  const double bound = (std::cosh(rho) - std::cosh(a - b)) / (2.0 * std::sinh(a)) / std::sinh(b);
  if (bound >= 1.0) return kPi;
  if (bound <= 0.0) return 0.0;
  return 2.0 * std::asin(std::sqrt(bound));
}

/// Angular adjacency threshold: d(u, v) <= R iff dtheta <= this value.
inline double max_angle_for_edge(double r_u, double r_v, const ModelParams& params) {
  return max_angle_within(r_u, r_v, params.R);
}

}  // namespace rhg
