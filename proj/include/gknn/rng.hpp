// Copyright 2026 The gknn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace gknn {

/// Counter-based 64-bit generator: SplitMix64 evaluated at a counter.
///
///   output(key, i) = mix(key + (i + 1) * 0x9E3779B97F4A7C15)
///   mix(z): z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
///           z ^= z >> 27; z *= 0x94D049BB133111EB;
///           z ^= z >> 31
///
/// Every draw is a pure function of (key, counter), so streams are
/// reproducible bit-for-bit on any platform. Derived streams come from
/// substream(tag), which rekeys with mix(key ^ mix(tag)).
class CounterRng {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit constexpr CounterRng(std::uint64_t key, std::uint64_t counter = 0)
      : key_(key), counter_(counter) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  constexpr std::uint64_t at(std::uint64_t counter) const {
    return mix(key_ + (counter + 1) * kGamma);
  }

  constexpr std::uint64_t next() { return at(counter_++); }

  constexpr CounterRng substream(std::uint64_t tag) const {
    return CounterRng(mix(key_ ^ mix(tag)));
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  /// [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased integer in [0, n) by rejection. n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t x = next();
      if (x >= threshold) return x % n;
    }
  }

  /// Inclusive integer range.
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal, Box-Muller cosine branch; consumes two draws.
  double normal() {
    const double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace gknn
