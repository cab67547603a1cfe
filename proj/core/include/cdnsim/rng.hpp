// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <array>
#include <cstdint>

namespace cdnsim {

/// splitmix64 step: advances *state and returns the mixed output.
/// The finalizer is bijective on 64-bit words, which makes it suitable both
/// for seeding and for deriving stream identifiers.
inline std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// One-shot avalanche of a 64-bit word (splitmix64 finalizer).
inline std::uint64_t mix64(std::uint64_t x) noexcept {
  std::uint64_t s = x;
  return splitmix64(s);
}

/// xoshiro256++ generator.
///
/// Chosen over std::mt19937_64 because the standard does not pin down the
/// distribution adapters, so results built on top of them are not
/// reproducible across standard libraries. Everything downstream (uniform
/// doubles, bounded integers, service time transforms) is written against
/// this generator only, which keeps every run bit-reproducible from its
/// seed on any platform.
///
/// Stream splitting: split(k) derives an independent generator from the
/// original seed and the stream id k via two rounds of splitmix64 mixing.
/// Per-server sampling streams use split(server_index).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : seed_(seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) word = splitmix64(x);
  }

  std::uint64_t next() noexcept {
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
  double uniform01() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound); unbiased via rejection. bound must be >= 1.
  std::uint64_t below(std::uint64_t bound) noexcept {
    const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  /// Independent generator derived from (seed, stream).
  Rng split(std::uint64_t stream) const noexcept {
    return Rng(mix64(seed_ ^ mix64(stream ^ 0x632be59bd9b4e019ULL)));
  }

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
  std::uint64_t seed_ = 0;
};

}  // namespace cdnsim
