#pragma once

#include <cmath>
#include <cstdint>
#include <iostream>
#include <numbers>
#include <string>

#include "error.hpp"

namespace rhg {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kMaxRadius = 700.0;

/// Model constants (alpha, C, n) and the disc radius R = 2 ln n + C.
///
/// R is authoritative for all geometry and measure work. When a caller
/// fixes R directly (from_radius) n is the nearest integer to e^{(R-C)/2},
/// and expected_count() returns the exact Poisson mean delta * e^{R/2}.
struct ModelParams {
  double alpha = 0.75;
  double C = 0.0;
  std::uint64_t n = 0;
  double R = 0.0;

  static ModelParams from_n(double alpha, double C, std::uint64_t n,
                            bool allow_alpha_outside = false) {
    require(n >= 1, "n must be at least 1");
    ModelParams p{alpha, C, n, 2.0 * std::log(static_cast<double>(n)) + C};
    p.validate(allow_alpha_outside);
    return p;
  }

  static ModelParams from_radius(double alpha, double R, double C = 0.0,
                                 bool allow_alpha_outside = false) {
    require(std::isfinite(R), "R must be finite");
    const double nominal = std::exp((R - C) / 2.0);
    const auto n = static_cast<std::uint64_t>(std::llround(std::max(1.0, nominal)));
    ModelParams p{alpha, C, n, R};
    p.validate(allow_alpha_outside);
    return p;
  }

  void validate(bool allow_alpha_outside = false) const {
    require(std::isfinite(alpha) && alpha > 0.0, "alpha must be positive");
    require(std::isfinite(C), "C must be finite");
    require(R > 0.0, "R = 2 ln n + C must be positive");
    require(R <= kMaxRadius, "R > 700 would overflow double-precision cosh");
    if (!(alpha > 0.5 && alpha < 1.0)) {
      require(allow_alpha_outside, "alpha must lie in (1/2, 1)");
      std::clog << "warning: alpha=" << alpha
                << " is outside (1/2, 1); structural results do not apply\n";
    }
  }

  /// delta * e^{R/2} with delta = e^{-C/2}: the Poisson intensity mass.
  double expected_count() const { return std::exp((R - C) / 2.0); }
  double delta() const { return std::exp(-C / 2.0); }

  bool operator==(const ModelParams&) const = default;
};

}  // namespace rhg
