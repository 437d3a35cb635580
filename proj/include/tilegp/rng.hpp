#pragma once

#include <cstdint>

namespace tilegp {

/// SplitMix64 (Steele, Lea & Flood 2014). The whole artifact draws its
/// randomness from this one generator so that equal seeds reproduce equal
/// results across runs of the same build. State advances by the golden-ratio
/// increment; each output is a finalizing mix of the state.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Strictly inside (0, 1): 53 high bits plus a half-ulp offset.
  double next_uniform() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

/// Derives the seed of an independent substream. Stream 0 drives location
/// draws, stream 1 drives observation noise; the split keeps the two
/// independent so that e.g. changing covariance parameters never moves the
/// simulated locations.
std::uint64_t split_stream(std::uint64_t seed, int stream);

/// Inverse of the standard normal CDF, Wichura's AS 241 rational
/// approximation (double-precision PPND16 variant). u must lie in (0, 1).
double inverse_normal_cdf(double u);

/// Standard normal draw via inverse-CDF transform of next_uniform().
double next_standard_normal(SplitMix64& rng);

}  // namespace tilegp
