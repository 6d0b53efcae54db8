// Copyright 2026 The LeafForge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <string>
#include <string_view>

namespace leafforge {

/// SplitMix64 output finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// 64-bit FNV-1a. Used to turn string identifiers into stream keys; stable
/// across platforms because it only depends on the bytes.
constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const char ch : s) {
    h ^= static_cast<std::uint8_t>(ch);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Folds one more word into a running key.
constexpr std::uint64_t combine64(std::uint64_t key, std::uint64_t word) noexcept {
  return mix64(key ^ mix64(word + kGoldenGamma));
}

/**
 * Counter-based SplitMix64 stream. The n-th draw is mix64(seed + n * gamma),
 * so a stream is fully described by its seed and how many values it has
 * produced. All distributions are implemented here instead of taking them
 * from <random>, whose distributions are not specified bit-for-bit.
 */
class RngStream {
 public:
  explicit constexpr RngStream(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next_u64() noexcept {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi); returns exactly lo when lo == hi.
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on the closed range [lo, hi] (Lemire's multiply-shift,
  /// with rejection so the result is unbiased).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept {
    __extension__ using u128 = unsigned __int128;
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next_u64());
    const std::uint64_t threshold = (0 - span) % span;
    for (;;) {
      const u128 m = static_cast<u128>(next_u64()) * static_cast<u128>(span);
      if (static_cast<std::uint64_t>(m) >= threshold) {
        return lo + static_cast<std::int64_t>(m >> 64);
      }
    }
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Standard normal via the Marsaglia polar method; the spare value is
  /// discarded so every call consumes a whole number of rejection rounds.
  double normal() noexcept { return normal_pair().first; }

  /// Both values of one polar-method round.
  std::pair<double, double> normal_pair() noexcept {
    for (;;) {
      const double u = 2.0 * uniform() - 1.0;
      const double v = 2.0 * uniform() - 1.0;
      const double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) {
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        return {u * f, v * f};
      }
    }
  }

  double normal(double mean, double sigma) noexcept { return mean + sigma * normal(); }

 private:
  std::uint64_t state_;
};

}  // namespace leafforge
