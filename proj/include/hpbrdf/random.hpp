// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace hpbrdf {

/// Counter-based normal deviates: the value depends only on the seed and
/// the key, never on evaluation order.
class CounterNormal {
 public:
  explicit CounterNormal(std::uint64_t seed) : seed_(seed) {}

  double operator()(std::initializer_list<std::uint64_t> key) const {
    std::uint64_t h = mix(seed_ ^ 0x9e3779b97f4a7c15ULL);
    for (std::uint64_t k : key) h = mix(h ^ (k + 0x632be59bd9b4e019ULL));
    // Box-Muller on two decorrelated uniforms in (0, 1].
    const double u1 = (double((mix(h) >> 11)) + 1.0) * 0x1.0p-53;
    const double u2 = double(mix(h ^ 0xd1b54a32d192ed03ULL) >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
};

}  // namespace hpbrdf
