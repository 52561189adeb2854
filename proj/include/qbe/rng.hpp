#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace qbe {

/// Reproducible random source. The raw engine is std::mt19937_64 (fully
/// specified by the standard, so byte-identical across platforms); the
/// variate mappings below are fixed by this library, not delegated to
/// implementation-defined std distributions.
///
/// Stream discipline (versioned; do not change without bumping):
///   uniform()  consumes exactly one 64-bit word,
///   normal()   consumes exactly two 64-bit words (Box-Muller, no caching).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform on [0,1) with 53-bit resolution.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; the second variate is discarded so the
  /// word count per draw stays constant.
  double normal() {
    double u1 = uniform();
    const double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  std::uint64_t raw() { return eng_(); }

  /// Independent stream for (seed, stream_id), e.g. one per Monte Carlo
  /// replication. splitmix64 mixing keeps nearby ids decorrelated.
  static Rng derive(std::uint64_t seed, std::uint64_t stream_id) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream_id + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return Rng(z ^ (z >> 31));
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace qbe
