#pragma once

// Counter-based random numbers.
//
// Philox4x32-10 keyed by the 64-bit master seed. The 128-bit counter is split
// into a 64-bit stream id and a 64-bit block index, so stream (seed, s) is a
// pure function of its coordinates: replication r of an experiment draws from
// stream r no matter which thread runs it.

#include <array>
#include <cstdint>
#include <limits>

namespace fclt {

/// One application of Philox4x32 with 10 rounds.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// SplitMix64 finaliser; used to derive independent seeds and stream ids.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed for a named sub-experiment (pilot, lrc, ...), independent of `seed`'s
/// other uses.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return mix64(seed ^ mix64(tag + 0x632BE59BD9B4E019ULL));
}

class Rng {
public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Standard normal (Marsaglia polar method).
  double normal();

  /// Independent generator for a child index, e.g. redraw j of outer sample i.
  Rng substream(std::uint64_t child) const {
    return Rng(seed_, mix64(stream_ ^ mix64(child + 1)));
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buf_{};
  int pos_ = 2;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace fclt
