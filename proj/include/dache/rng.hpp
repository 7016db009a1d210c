// SPDX-FileCopyrightText: 2026 The dache authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <numbers>
#include <vector>

#include "dache/vec2.hpp"

namespace dache {

/// splitmix64 finalizer; used to mix seeds and derive independent streams.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic seeded generator (xoshiro256++ core, splitmix-seeded).
///
/// All randomness in the library flows through this type so that a fixed
/// seed reproduces bit-identical runs on any platform. Standard-library
/// distributions are avoided on purpose: their output is
/// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) {
      s = mix64(s);
      word = s;
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

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform angle in [0, 2*pi).
  double angle() { return uniform(0.0, 2.0 * std::numbers::pi); }

  /// Unit direction vector with uniform angle.
  Vec2 unit_vector() {
    const double a = angle();
    return {std::cos(a), std::sin(a)};
  }

  /// Uniform integer in [0, n). Unbiased via rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  bool bernoulli(double p) { return uniform() < p; }

  std::vector<std::uint8_t> bytes(std::size_t n) {
    std::vector<std::uint8_t> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (i % 8 == 0) buffer_ = next_u64();
      out[i] = static_cast<std::uint8_t>(buffer_ >> ((i % 8) * 8));
    }
    return out;
  }

  /// Fisher-Yates sample of k distinct indices from [0, n).
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(below(n - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
  }

  /// Independent child stream; `tag` distinguishes siblings.
  Rng derive(std::uint64_t tag) const {
    return Rng(mix64(state_[0] ^ mix64(tag ^ 0xd6e8feb86659fd93ULL)));
  }

 private:
  static std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  }

  std::uint64_t state_[4] = {};
  std::uint64_t buffer_ = 0;
};

}  // namespace dache
