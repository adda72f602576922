// Copyright 2026 AGNav Authors
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
//
// Seeded sampling helpers on top of mt19937_64. The engine sequence is
// pinned by the standard; the std::*_distribution adapters are not, so
// anything that must reproduce across toolchains uses these instead.

#ifndef AGNAV_RNG_HPP
#define AGNAV_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace agnav {

/// Uniform double in [0, 1).
inline double rand_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double rand_range(std::mt19937_64& rng, double a, double b) {
  return a + (b - a) * rand_unit(rng);
}

/// Uniform integer in [lo, hi], both inclusive.
inline int rand_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

/// Standard normal via Box-Muller; two engine draws per sample.
inline double rand_gauss(std::mt19937_64& rng) {
  const double u1 = 1.0 - rand_unit(rng);  // (0, 1], keeps the log finite
  const double u2 = rand_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace agnav

#endif  // AGNAV_RNG_HPP
