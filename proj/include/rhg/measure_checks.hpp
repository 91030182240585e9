#pragma once

// Closed form versus Monte-Carlo comparisons, shared by the CLI and the
// acceptance suite.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "explorer.hpp"
#include "measure.hpp"

namespace rhg {

struct BandRatioReport {
  int band = 0;
  double r_A = 0.0;
  McEstimate numerator;
  McEstimate denominator;
  double ratio = 0.0;
  double floor = 0.0;
  bool clears_floor = false;
};

inline constexpr double kBandRatioFloor = 0.05;

/// mu(B_A(R) cap (B_O(R_i) \ B_O(R_{i-1}))) / mu(B_A(R) cap B_O(R_i)) for A at
/// (r_A, 0), both terms estimated from one shared sample stream.
inline BandRatioReport band_ratio_check(int i, double r_A, const ModelParams& params, const BandSchedule& s,
                                        double xi = 1.0, std::uint64_t samples = 1'000'000,
                                        std::uint64_t seed = 1, double floor = kBandRatioFloor) {
  require(i >= 1 && i + 1 < static_cast<int>(s.R_outer.size()), "band index out of range");
  require(s.R_outer[i] < r_A && r_A <= s.R_outer[i + 1], "band ratio needs R_i < r_A <= R_{i+1}");
  require(s.R_outer[i] < params.R - xi, "band ratio needs R_i < R - xi");
  const PolarPoint A{r_A, 0.0};
  const Region den = Region::intersection({Region::ball_at(A, params.R), Region::ball_origin(s.R_outer[i])});
  const Region num = Region::intersection(
      {Region::ball_at(A, params.R), Region::band_origin(s.R_outer[i - 1], s.R_outer[i])});
  const auto est = mu_monte_carlo_shared({num, den}, samples, seed, params, den.support(params.R));
  BandRatioReport rep;
  rep.band = i;
  rep.r_A = r_A;
  rep.numerator = est[0];
  rep.denominator = est[1];
  rep.ratio = est[1].hits > 0 ? static_cast<double>(est[0].hits) / static_cast<double>(est[1].hits) : 0.0;
  rep.floor = floor;
  rep.clears_floor = rep.ratio >= floor;
  return rep;
}

/// One row of the measure-check CSV.
struct MeasureCheck {
  std::string region_id;
  double closed_form = 0.0;
  McEstimate mc;
  double envelope = 0.0;
  bool pass = false;
};

inline MeasureCheck finish_check(std::string id, double closed, double envelope, const McEstimate& mc) {
  MeasureCheck c;
  c.region_id = std::move(id);
  c.closed_form = closed;
  c.mc = mc;
  c.envelope = envelope;
  c.pass = std::fabs(mc.mean - closed) <= mc.half_width + envelope;
  return c;
}

inline std::string check_id(const char* kind, const ModelParams& p, const std::string& extra) {
  return std::string(kind) + ":alpha=" + format_decimal(p.alpha) + ":R=" + format_decimal(p.R) + extra;
}

/// Origin ball of radius rho. The oracle samples the whole disc (a
/// support-restricted draw would return the exact CDF by construction).
inline MeasureCheck check_ball_origin(double rho, const ModelParams& p, std::uint64_t samples, std::uint64_t seed) {
  const auto mc = mu_monte_carlo(Region::ball_origin(rho), samples, seed, p, McOptions{false});
  return finish_check(check_id("ball_origin", p, ":rho=" + format_decimal(rho)), mu_ball_origin_approx(rho, p),
                      mu_ball_origin_envelope(p), mc);
}

inline MeasureCheck check_ball_intersection(double r_A, double rho_A, double rho_O, const ModelParams& p,
                                            std::uint64_t samples, std::uint64_t seed) {
  const PolarPoint A{r_A, 1.0};
  const auto cf = mu_ball_intersection_approx(r_A, rho_A, rho_O, p);
  const auto mc = mu_monte_carlo(Region::intersection({Region::ball_at(A, rho_A), Region::ball_origin(rho_O)}),
                                 samples, seed, p);
  return finish_check(check_id("ball_intersection", p,
                               ":r_A=" + format_decimal(r_A) + ":rho_A=" + format_decimal(rho_A) +
                                   ":rho_O=" + format_decimal(rho_O)),
                      cf.value, cf.envelope, mc);
}

inline MeasureCheck check_band_origin(double rho_hi, double rho_lo, const ModelParams& p, std::uint64_t samples,
                                      std::uint64_t seed) {
  const auto cf = mu_band_origin_approx(rho_hi, rho_lo, p);
  const auto mc = mu_monte_carlo(Region::band_origin(rho_lo, rho_hi), samples, seed, p, McOptions{false});
  return finish_check(
      check_id("band_origin", p, ":hi=" + format_decimal(rho_hi) + ":lo=" + format_decimal(rho_lo)), cf.value,
      cf.envelope, mc);
}

inline Region shell_band_region(const PolarPoint& A, const BandOffsets& c, const ModelParams& p) {
  return Region::intersection({Region::difference(Region::ball_at(A, p.R), Region::ball_at(A, p.R - c.c3)),
                               Region::band_origin(p.R - c.c2, p.R - c.c1)});
}

inline MeasureCheck check_shell_band(double r_A, const BandOffsets& c, const ModelParams& p, std::uint64_t samples,
                                     std::uint64_t seed) {
  const PolarPoint A{r_A, 2.0};
  const auto cf = mu_shell_band(r_A, c, p);
  const auto mc = mu_monte_carlo(shell_band_region(A, c, p), samples, seed, p);
  return finish_check(check_id("shell_band", p, ":r_A=" + format_decimal(r_A)), cf.value, cf.envelope, mc);
}

/// The lens-minus-ball measure lies between half and all of the shell-band
/// measure around B; reported as midpoint plus half-range.
inline MeasureCheck check_lens_minus_ball(const PolarPoint& A, const PolarPoint& B, const BandOffsets& c,
                                          const ModelParams& p, std::uint64_t samples, std::uint64_t seed) {
  const auto rep = mu_lens_minus_ball(A, B, c, samples, seed, p);
  const double mid = 0.5 * (rep.lower + rep.upper);
  return finish_check(check_id("lens_minus_ball", p,
                               ":r_A=" + format_decimal(A.r) + ":r_B=" + format_decimal(B.r) +
                                   ":d=" + format_decimal(hyperbolic_distance(A, B))),
                      mid, 0.5 * (rep.upper - rep.lower), rep.estimate);
}

/// B at angle 0 and A at radius r_A placed so that d(A, B) = target.
inline PolarPoint place_at_distance(double r_A, const PolarPoint& B, double target) {
  return {r_A, wrap_angle(B.theta + angle_at_origin(r_A, B.r, target))};
}

/// The fixed 20-configuration grid at R in {25, 30, 35}.
inline std::vector<MeasureCheck> standard_measure_grid(std::uint64_t samples, std::uint64_t seed) {
  std::vector<MeasureCheck> out;
  std::uint64_t k = 0;
  auto next_seed = [&] { return mix(seed, k++); };
  const BandOffsets c{};
  // origin balls
  out.push_back(check_ball_origin(23.0, ModelParams::from_radius(0.75, 25.0), samples, next_seed()));
  out.push_back(check_ball_origin(26.0, ModelParams::from_radius(0.6, 30.0), samples, next_seed()));
  out.push_back(check_ball_origin(31.0, ModelParams::from_radius(0.9, 35.0), samples, next_seed()));
  out.push_back(check_ball_origin(20.0, ModelParams::from_radius(0.6, 25.0), samples, next_seed()));
  // ball intersections
  out.push_back(check_ball_intersection(20.0, 25.0, 25.0, ModelParams::from_radius(0.75, 25.0), samples, next_seed()));
  out.push_back(check_ball_intersection(25.0, 30.0, 15.0, ModelParams::from_radius(0.75, 30.0), samples, next_seed()));
  out.push_back(check_ball_intersection(26.0, 30.0, 28.0, ModelParams::from_radius(0.6, 30.0), samples, next_seed()));
  out.push_back(check_ball_intersection(30.0, 35.0, 35.0, ModelParams::from_radius(0.9, 35.0), samples, next_seed()));
  out.push_back(check_ball_intersection(28.0, 33.0, 30.0, ModelParams::from_radius(0.75, 35.0), samples, next_seed()));
  // bands at the origin
  out.push_back(check_band_origin(29.0, 28.0, ModelParams::from_radius(0.75, 30.0), samples, next_seed()));
  out.push_back(check_band_origin(25.0, 23.0, ModelParams::from_radius(0.6, 25.0), samples, next_seed()));
  out.push_back(check_band_origin(34.5, 33.0, ModelParams::from_radius(0.9, 35.0), samples, next_seed()));
  // shell bands
  out.push_back(check_shell_band(24.75, c, ModelParams::from_radius(0.75, 25.0), samples, next_seed()));
  out.push_back(check_shell_band(29.8, c, ModelParams::from_radius(0.6, 30.0), samples, next_seed()));
  out.push_back(check_shell_band(34.7, c, ModelParams::from_radius(0.9, 35.0), samples, next_seed()));
  out.push_back(check_shell_band(29.75, c, ModelParams::from_radius(0.75, 30.0), samples, next_seed()));
  // lens minus ball
  for (const auto& [alpha, R, ra, rb, dist] : std::vector<std::tuple<double, double, double, double, double>>{
           {0.75, 25.0, 24.75, 24.75, 24.95},
           {0.75, 30.0, 29.8, 29.72, 29.93},
           {0.6, 30.0, 29.75, 29.78, 29.97},
           {0.9, 35.0, 34.72, 34.78, 34.92}}) {
    const auto p = ModelParams::from_radius(alpha, R);
    const PolarPoint B{rb, 0.5};
    out.push_back(check_lens_minus_ball(place_at_distance(ra, B, dist), B, c, p, samples, next_seed()));
  }
  return out;
}

}  // namespace rhg
