// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace rfpc {

/// SplitMix64 step. Fast, well-mixed, and trivially seedable; used both as a
/// sequential generator and as the mixing function for counter-based streams.
inline uint64_t splitmix64(uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t mix_u64(uint64_t x) {
  uint64_t s = x;
  return splitmix64(s);
}

/// Small sequential RNG with value semantics.
class Rng {
public:
  explicit Rng(uint64_t seed = 0) : state_(mix_u64(seed ^ 0xa02b4c5d6e7f8899ULL)) {}

  uint64_t next_u64() { return splitmix64(state_); }

  /// Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). n must be > 0.
  uint64_t next_below(uint64_t n) {
    // Modulo bias is negligible for the ranges used here (n << 2^64).
    return next_u64() % n;
  }

  /// Uniform in [lo, hi).
  double next_range(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

private:
  uint64_t state_;
};

/// Counter-based stream: a deterministic RNG derived from (seed, a, b, c).
/// Parallel consumers can draw independent reproducible streams without
/// sharing state.
inline Rng stream_rng(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
  uint64_t h = seed;
  h = mix_u64(h ^ (a + 0x9e3779b97f4a7c15ULL));
  h = mix_u64(h ^ (b + 0xc2b2ae3d27d4eb4fULL));
  h = mix_u64(h ^ (c + 0x165667b19e3779f9ULL));
  return Rng(h);
}

} // namespace rfpc
