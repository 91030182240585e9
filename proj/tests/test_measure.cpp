#include <gtest/gtest.h>

#include <random>

#include <rhg/measure_checks.hpp>

#include "oracles.hpp"

using namespace rhg;

namespace {

// Exact CDF written from the density, not through the library.
double cdf(double r, const ModelParams& p) { return (std::cosh(p.alpha * r) - 1.0) / (std::cosh(p.alpha * p.R) - 1.0); }

}  // namespace

TEST(BallOrigin, ExactEndpointsAndAsymptotics) {
  const auto p = ModelParams::from_radius(0.75, 30.0);
  EXPECT_EQ(mu_ball_origin_exact(0.0, p), 0.0);
  EXPECT_NEAR(mu_ball_origin_exact(30.0, p), 1.0, 1e-15);
  const double exact = mu_ball_origin_exact(20.0, p);
  EXPECT_NEAR(exact, cdf(20.0, p), 1e-15 * cdf(20.0, p) + 1e-300);
  EXPECT_NEAR(exact / std::exp(-0.75 * 10.0), 1.0, 2e-3);
  EXPECT_THROW(mu_ball_origin_exact(-1.0, p), ValidationError);
  EXPECT_THROW(mu_ball_origin_exact(31.0, p), ValidationError);
}

TEST(BallOrigin, ApproxSubstitution) {
  const auto p = ModelParams::from_radius(0.75, 30.0);
  EXPECT_EQ(mu_ball_origin_approx(30.0, p), 1.0);
  EXPECT_DOUBLE_EQ(mu_ball_origin_approx(15.0, p), std::exp(-11.25));
}

TEST(BallOrigin, RatioTendsToOne) {
  // With rho = R/2 + t and R large, exact/approx - 1 shrinks as t and R grow.
  double prev = 1.0;
  for (double R : {10.0, 15.0, 20.0, 25.0, 30.0}) {
    const auto p = ModelParams::from_radius(0.75, R);
    const double rho = 0.5 * R;
    const double err = std::fabs(mu_ball_origin_exact(rho, p) / mu_ball_origin_approx(rho, p) - 1.0);
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(BallOrigin, EnvelopeBoundsTheApproximationError) {
  for (double alpha : {0.6, 0.75, 0.9}) {
    for (double R : {25.0, 30.0, 35.0}) {
      const auto p = ModelParams::from_radius(alpha, R);
      for (double rho = 0.0; rho <= R; rho += 0.25) {
        ASSERT_LE(std::fabs(cdf(rho, p) - mu_ball_origin_approx(rho, p)), mu_ball_origin_envelope(p) + 1e-16);
      }
    }
  }
}

TEST(BallOrigin, WithinOnePercentForRhoAtLeastHalfR) {
  for (double alpha : {0.6, 0.75, 0.9}) {
    for (double R : {25.0, 30.0, 35.0}) {
      const auto p = ModelParams::from_radius(alpha, R);
      for (double rho = R / 2; rho <= R; rho += 0.1) {
        ASSERT_NEAR(mu_ball_origin_approx(rho, p) / cdf(rho, p), 1.0, 0.01) << alpha << " " << R << " " << rho;
      }
    }
  }
}

TEST(BallOrigin, Monotone) {
  const auto p = ModelParams::from_radius(0.6, 25.0);
  double prev = 0.0;
  for (double rho = 0.0; rho <= 25.0; rho += 0.01) {
    const double v = mu_ball_origin_exact(rho, p);
    ASSERT_GE(v, prev);
    prev = v;
  }
}

TEST(BallIntersection, FullRadiiReducesToCAlphaTerm) {
  const auto p = ModelParams::from_radius(0.75, 30.0);
  for (double rA : {10.0, 20.0, 29.0}) {
    const auto cf = mu_ball_intersection_approx(rA, 30.0, 30.0, p);
    EXPECT_NEAR(cf.value, 2 * 0.75 / (kPi * 0.25) * std::exp(-rA / 2), 1e-15);
  }
  EXPECT_DOUBLE_EQ(c_alpha(0.75), 6.0 / kPi);
}

TEST(BallIntersection, AgreesWithMonteCarlo) {
  const auto p = ModelParams::from_radius(0.75, 30.0);
  const auto check = check_ball_intersection(25.0, 30.0, 15.0, p, 2'000'000, 11);
  EXPECT_TRUE(check.pass) << check.closed_form << " vs " << check.mc.mean << " +- " << check.mc.half_width
                          << " env " << check.envelope;
}

TEST(BallIntersection, AgreesWithQuadrature) {
  // mu(B_A(rho_A) cap B_O(rho_O)) by radial quadrature of the angular width.
  for (const auto& [alpha, R, rA, rhoA, rhoO] : std::vector<std::tuple<double, double, double, double, double>>{
           {0.75, 30.0, 25.0, 30.0, 15.0}, {0.75, 25.0, 20.0, 25.0, 25.0}, {0.6, 30.0, 26.0, 30.0, 28.0},
           {0.9, 35.0, 30.0, 35.0, 35.0}}) {
    const auto p = ModelParams::from_radius(alpha, R);
    const double truth = static_cast<double>(oracle::ball_band_measure(rA, rhoA, 0.0, rhoO, alpha, R, 8000));
    const auto cf = mu_ball_intersection_approx(rA, rhoA, rhoO, p);
    EXPECT_LE(std::fabs(cf.value - truth), cf.envelope) << alpha << " " << R << " " << rA;
  }
}

TEST(BallIntersection, HypothesisViolation) {
  const auto p = ModelParams::from_radius(0.75, 30.0);
  EXPECT_THROW(mu_ball_intersection_approx(10.0, 30.0, 15.0, p), ValidationError);
  EXPECT_THROW(mu_ball_intersection_approx(25.0, 20.0, 15.0, p), ValidationError);
}

TEST(BandOrigin, ExactExamplesAndAgreement) {
  const auto p = ModelParams::from_radius(0.75, 30.0);
  EXPECT_EQ(mu_band_origin(12.0, 12.0, p), 0.0);
  EXPECT_NEAR(mu_band_origin(30.0, 0.0, p), 1.0, 1e-15);
  const double exact = mu_band_origin(29.0, 28.0, p);
  EXPECT_NEAR(exact, cdf(29.0, p) - cdf(28.0, p), 1e-15);
  EXPECT_NEAR(mu_band_origin_approx(29.0, 28.0, p).value / exact, 1.0, 0.01);
  EXPECT_THROW(mu_band_origin(28.0, 29.0, p), ValidationError);
}

TEST(BandOrigin, AdditiveOverConcatenation) {
  const auto p = ModelParams::from_radius(0.9, 35.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 35.0);
  for (int i = 0; i < 1000; ++i) {
    double a = u(rng), b = u(rng), c = u(rng);
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    ASSERT_NEAR(mu_band_origin(c, a, p), mu_band_origin(c, b, p) + mu_band_origin(b, a, p), 1e-12);
  }
}

TEST(MonteCarlo, FullAndEmptyRegions) {
  const auto p = ModelParams::from_radius(0.75, 30.0);
  for (bool restrict : {true, false}) {
    const auto full = mu_monte_carlo(Region::ball_origin(30.0), 10'000, 1, p, McOptions{restrict});
    EXPECT_EQ(full.mean, 1.0);
    EXPECT_EQ(full.half_width, 0.0);
    const auto empty = mu_monte_carlo(Region::ball_origin(0.0), 10'000, 1, p, McOptions{restrict});
    EXPECT_EQ(empty.mean, 0.0);
  }
  EXPECT_THROW(mu_monte_carlo(Region::ball_origin(1.0), 9'999, 1, p), ValidationError);
}

TEST(MonteCarlo, RandomOriginBallsWithinConfidence) {
  // Each reported interval has 99% coverage, so across 20 draws about 0.2
  // misses are expected; more than 2 has probability about 1e-3. All 20 must
  // sit inside the Bonferroni-widened interval (familywise 99%).
  const auto p = ModelParams::from_radius(0.75, 30.0);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(p.R - 8.0, p.R);
  const double widen = 3.4808 / kZ99;  // z for 1 - 0.01/20 two-sided
  int misses = 0;
  for (int k = 0; k < 20; ++k) {
    const double rho = u(rng);
    const auto est = mu_monte_carlo(Region::ball_origin(rho), 200'000, 100 + k, p, McOptions{false});
    const double err = std::fabs(est.mean - cdf(rho, p));
    misses += err > est.half_width;
    EXPECT_LE(err, widen * est.half_width) << "rho=" << rho;
  }
  EXPECT_LE(misses, 2);
}

TEST(MonteCarlo, RestrictedSupportMatchesQuadrature) {
  // B_A(rho) intersected with a band, where the support box is narrow in angle.
  const auto p = ModelParams::from_radius(0.75, 30.0);
  const PolarPoint A{25.0, 4.0};
  for (const auto& [rho, lo, hi] : std::vector<std::tuple<double, double, double>>{
           {30.0, 20.0, 28.0}, {28.0, 25.0, 30.0}, {30.0, 29.0, 29.5}}) {
    const auto est = mu_monte_carlo(Region::intersection({Region::ball_at(A, rho), Region::band_origin(lo, hi)}),
                                    400'000, 5, p);
    const double truth = static_cast<double>(oracle::ball_band_measure(A.r, rho, lo, hi, 0.75, 30.0, 8000));
    EXPECT_LT(est.support_mass, 1.0);
    EXPECT_LE(std::fabs(est.mean - truth), est.half_width) << rho << " " << lo << " " << hi;
  }
}

TEST(MonteCarlo, SupportBoxContainsRegion) {
  // every hit found by whole-disc sampling lies in the restricted box
  const auto p = ModelParams::from_radius(0.75, 20.0);
  const PolarPoint A{18.0, 0.1};
  const Region reg = Region::intersection({Region::ball_at(A, 20.0), Region::band_origin(17.0, 19.0)});
  const auto box = reg.support(p.R);
  ASSERT_FALSE(box.full_circle);
  StreamRng rng(77, 0);
  int hits = 0;
  for (int i = 0; i < 2'000'000; ++i) {
    const PolarPoint x{radial_quantile(rng.uniform(), p), kTwoPi * rng.uniform()};
    if (!reg.contains(x)) continue;
    ++hits;
    ASSERT_GE(x.r, box.r_lo);
    ASSERT_LE(x.r, box.r_hi);
    ASSERT_LE(angular_difference(x.theta, box.center), box.half_width);
  }
  EXPECT_GT(hits, 0);
}

TEST(MonteCarlo, DeterministicAndSharedStreamConsistent) {
  const auto p = ModelParams::from_radius(0.6, 25.0);
  const PolarPoint A{24.8, 1.0};
  const BandOffsets c{};
  const Region a = shell_band_region(A, c, p);
  const Region b = Region::intersection({Region::ball_at(A, p.R), Region::band_origin(p.R - c.c2, p.R - c.c1)});
  const auto e1 = mu_monte_carlo(a, 150'000, 9, p);
  EXPECT_EQ(e1, mu_monte_carlo(a, 150'000, 9, p));
  EXPECT_NE(e1.mean, mu_monte_carlo(a, 150'000, 10, p).mean);
  const auto shared = mu_monte_carlo_shared({a, b}, 150'000, 9, p, a.support(p.R));
  EXPECT_EQ(shared[0], e1);
  EXPECT_LE(shared[0].hits, shared[1].hits);
}

TEST(ShellBand, ClosedFormAgreesWithQuadrature) {
  const BandOffsets c{};
  for (double alpha : {0.6, 0.75, 0.9}) {
    for (double R : {25.0, 30.0, 35.0}) {
      const auto p = ModelParams::from_radius(alpha, R);
      for (double rA : {R - c.c2, R - 0.25, R - c.c1}) {
        const auto truth = oracle::ball_band_measure(rA, R, R - c.c2, R - c.c1, alpha, R, 4000) -
                           oracle::ball_band_measure(rA, R - c.c3, R - c.c2, R - c.c1, alpha, R, 4000);
        const auto cf = mu_shell_band(rA, c, p);
        EXPECT_LE(std::fabs(cf.value - static_cast<double>(truth)), cf.envelope) << alpha << " " << R << " " << rA;
      }
    }
  }
}

TEST(ShellBand, OrderInverseN) {
  // n * mu stays between fitted constants across the band and across R.
  const BandOffsets c{};
  constexpr double kappa1 = 1.5e-3, kappa2 = 4.0e-3;
  for (double alpha : {0.6, 0.75, 0.9}) {
    for (double R : {25.0, 30.0, 35.0}) {
      const auto p = ModelParams::from_radius(alpha, R);
      for (int k = 0; k <= 10; ++k) {
        const double rA = std::min(R - c.c1, R - c.c2 + 0.01 * k);
        const double nmu = p.expected_count() * mu_shell_band(rA, c, p).value;
        EXPECT_GE(nmu, kappa1);
        EXPECT_LE(nmu, kappa2);
      }
    }
  }
}

TEST(ShellBand, Preconditions) {
  const auto p = ModelParams::from_radius(0.75, 30.0);
  EXPECT_THROW(mu_shell_band(29.0, {}, p), ValidationError);
  EXPECT_THROW(mu_shell_band(29.75, BandOffsets{0.3, 0.2, 0.1}, p), ValidationError);
  EXPECT_TRUE(offsets_valid({}));
  EXPECT_FALSE(offsets_valid({0.1, 0.2, 1.0}));
  EXPECT_FALSE(offsets_valid({0.2, 1.0, 0.1}));
}

TEST(LensMinusBall, ExpectedCountIsOrderOne) {
  const auto p = ModelParams::from_radius(0.75, 30.0);
  const BandOffsets c{};
  constexpr double kappa1 = 5e-4, kappa2 = 5e-3;
  for (const auto& [ra, rb, d] : std::vector<std::tuple<double, double, double>>{
           {29.8, 29.72, 29.93}, {29.75, 29.75, 29.95}, {29.7, 29.8, 29.91}, {29.79, 29.71, 29.99}}) {
    const PolarPoint B{rb, 0.5};
    const PolarPoint A = place_at_distance(ra, B, d);
    ASSERT_NEAR(hyperbolic_distance(A, B), d, 1e-9);
    const auto rep = mu_lens_minus_ball(A, B, c, 400'000, 3, p);
    EXPECT_NEAR(rep.expected_vertices, p.expected_count() * rep.estimate.mean, 1e-12);
    EXPECT_GE(rep.expected_vertices, kappa1);
    EXPECT_LE(rep.expected_vertices, kappa2);
    // within the half-to-full bracket of the shell-band measure around B
    EXPECT_GE(rep.estimate.mean + rep.estimate.half_width, rep.lower);
    EXPECT_LE(rep.estimate.mean - rep.estimate.half_width, rep.upper);
  }
}

TEST(LensMinusBall, ContainedInEnclosingShellBand) {
  const auto p = ModelParams::from_radius(0.75, 30.0);
  const BandOffsets c{};
  const PolarPoint B{29.72, 0.5};
  const PolarPoint A = place_at_distance(29.8, B, 29.93);
  const Region lens = lens_minus_ball_region(A, B, c, p);
  const auto est = mu_monte_carlo_shared({lens, shell_band_region(B, c, p)}, 300'000, 4, p, lens.support(p.R));
  EXPECT_GT(est[0].hits, 0u);
  EXPECT_LE(est[0].hits, est[1].hits);
}

TEST(LensMinusBall, Preconditions) {
  const auto p = ModelParams::from_radius(0.75, 30.0);
  const PolarPoint B{29.72, 0.5};
  const PolarPoint A = place_at_distance(29.8, B, 29.93);
  EXPECT_THROW(mu_lens_minus_ball(A, B, {0.1, 0.2, 1.0}, 10'000, 1, p), ValidationError);
  EXPECT_THROW(mu_lens_minus_ball(A, {29.0, 0.5}, {}, 10'000, 1, p), ValidationError);
  EXPECT_THROW(mu_lens_minus_ball(place_at_distance(29.8, B, 29.5), B, {}, 10'000, 1, p), ValidationError);
}

TEST(BandRatio, ContainmentFloorAndRange) {
  const auto p = ModelParams::from_n(0.75, 0.0, 10000);
  const auto s = compute_schedule(p);
  int checked = 0;
  for (int i = 1; i + 1 < static_cast<int>(s.R_outer.size()) && s.R_outer[i] < p.R - 1.0; ++i) {
    const double rA = 0.5 * (s.R_outer[i] + s.R_outer[i + 1]);
    const auto rep = band_ratio_check(i, rA, p, s, 1.0, 300'000, 7);
    EXPECT_LE(rep.numerator.hits, rep.denominator.hits);
    EXPECT_LE(rep.ratio, 1.0);
    EXPECT_TRUE(rep.clears_floor) << "band " << i << " ratio " << rep.ratio;
    ++checked;
  }
  EXPECT_GE(checked, 5);
  EXPECT_THROW(band_ratio_check(2, s.R_outer[1], p, s), ValidationError);
  EXPECT_THROW(band_ratio_check(0, s.R_outer[1], p, s), ValidationError);
}

TEST(MeasureGrid, TwentyConfigurationsAgree) {
  const auto grid = standard_measure_grid(1'000'000, 1);
  ASSERT_EQ(grid.size(), 20u);
  for (const auto& c : grid) {
    EXPECT_TRUE(c.pass) << c.region_id << ": closed " << c.closed_form << " mc " << c.mc.mean << " +- "
                        << c.mc.half_width << " env " << c.envelope;
  }
}
