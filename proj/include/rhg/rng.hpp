#pragma once

#include <cstdint>
#include <limits>

namespace rhg {

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Keyed mix of a seed and a counter; used to derive independent substreams.
constexpr std::uint64_t mix(std::uint64_t seed, std::uint64_t counter) {
  return splitmix64(seed ^ splitmix64(counter ^ 0xD1B54A32D192ED03ULL));
}

/// Counter-based generator: one instance per substream, e.g. per vertex.
/// Satisfies UniformRandomBitGenerator so it can drive <random> distributions.
class StreamRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr StreamRng(std::uint64_t key) : state_(key) {}
  constexpr StreamRng(std::uint64_t seed, std::uint64_t counter) : state_(mix(seed, counter)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// Stream keys reserved for non-vertex draws.
inline constexpr std::uint64_t kPoissonCountStream = 0xFFFFFFFFFFFFFFFFULL;
inline constexpr std::uint64_t kProbeStream = 0xFFFFFFFFFFFFFFFEULL;

}  // namespace rhg
