#pragma once

#include <cstdint>

namespace aoii {

// Portable splittable random stream.
//
// Algorithm (pinned; do not change without bumping the major version):
//   * state init: SplitMix64 over the 64-bit seed, with the stream id mixed in by
//     advancing a second SplitMix64 chain seeded with (seed ^ 0x9e3779b97f4a7c15*(stream+1)).
//     Four SplitMix64 outputs fill the xoshiro256++ state.
//   * next_u64(): xoshiro256++ (Blackman/Vigna), public-domain reference update.
//   * next_uniform(): (next_u64() >> 11) * 2^-53, giving a double in [0, 1).
//
// Same (seed, stream) gives the same sequence on every platform; distinct stream ids
// give statistically independent sequences. One stream per simulation replication.
//
// bernoulli(p) consumes exactly one next_uniform() draw when 0 < p < 1 and no draw when
// the outcome is already determined (p <= 0 or p >= 1). Trajectory replay and the
// policy-identity checks rely on this draw-count contract.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t z = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    for (auto& w : state_) {
      z += 0x9e3779b97f4a7c15ULL;
      std::uint64_t x = z;
      x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
      x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
      w = x ^ (x >> 31);
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return next_uniform() < p;
  }

  friend bool operator==(const RandomStream& a, const RandomStream& b) {
    return a.state_[0] == b.state_[0] && a.state_[1] == b.state_[1] &&
           a.state_[2] == b.state_[2] && a.state_[3] == b.state_[3];
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t state_[4];
};

}  // namespace aoii
