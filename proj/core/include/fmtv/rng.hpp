#pragma once

#include <cstdint>

#include "fmtv/normal.hpp"

namespace fmtv {

/// SplitMix64 finalizer (Steele, Lea & Flood). Bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Key of an independent stream derived from a root seed and a stream index.
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) {
  return mix64(mix64(seed ^ 0x6A09E667F3BCC909ULL) + mix64(stream + 0x9E3779B97F4A7C15ULL));
}

/// Counter-based generator: the i-th output of a stream is mix64(key + i*gamma),
/// so any (key, position) can be regenerated without replaying the stream.
class CounterStream {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  constexpr explicit CounterStream(std::uint64_t key, std::uint64_t position = 0)
      : key_(key), counter_(position) {}

  constexpr std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGamma); }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  constexpr double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal by inverse CDF; one uniform per variate.
  double next_normal() { return normal_quantile(next_uniform()); }

  [[nodiscard]] constexpr std::uint64_t position() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace fmtv
