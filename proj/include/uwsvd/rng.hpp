#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "uwsvd/types.hpp"

namespace uwsvd {

/// Splittable counter-seeded random stream (xoshiro256++ core, SplitMix64
/// derivation). Streams derived from distinct paths are statistically
/// independent, so trial t of an experiment always consumes
/// derive(seed, t, purpose) regardless of thread count or evaluation order.
///
/// All draw primitives are implemented here rather than with
/// <random> distributions so that output is bit-identical across platforms.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) { seed_state(splitmix_(seed)); }

  /// Child stream for (this stream, key). Deriving the same key twice yields
  /// the same child; distinct keys yield independent children.
  RngStream derive(std::uint64_t key) const {
    RngStream child(0);
    std::uint64_t x = origin_ ^ splitmix_(key ^ 0x9e3779b97f4a7c15ull);
    child.seed_state(splitmix_(x));
    return child;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl_(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl_(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound) for power-of-two bound.
  std::uint32_t uniform_pow2(std::uint32_t bound) {
    std::uint32_t bits = 0;
    while ((1u << bits) < bound) ++bits;
    return static_cast<std::uint32_t>(next_u64() >> (64 - bits));
  }

  /// Standard real normal N(0, 1) via Box-Muller (second variate discarded,
  /// keeping the draw count independent of call history).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Circularly-symmetric complex normal CN(0, 1): real and imaginary parts
  /// are independent N(0, 1/2).
  cplx normal_complex() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
  }

 private:
  void seed_state(std::uint64_t x) {
    origin_ = x;
    for (auto& w : s_) {
      x = splitmix_(x);
      w = x;
    }
    // xoshiro must not start from the all-zero state
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
  }

  static std::uint64_t splitmix_(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  static std::uint64_t rotl_(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  }

  std::uint64_t origin_ = 0;
  std::uint64_t s_[4] = {};
};

}  // namespace uwsvd
