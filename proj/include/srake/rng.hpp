// Copyright 2026 The srake Authors
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

#ifndef SRAKE_RNG_HPP
#define SRAKE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace srake {

/// Counter-based SplitMix64 generator.
///
/// Every stochastic routine in the library draws from an explicitly seeded
/// Rng. Trial streams are derived from (master seed, trial index, stream id)
/// so that trials are reproducible and independent of execution order, and
/// so that e.g. the genetic algorithm's stream does not perturb scenario
/// generation. All primitives below avoid std::*_distribution on purpose:
/// their output is implementation-defined, which would break byte-identical
/// reruns across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static Rng for_trial(std::uint64_t master_seed, std::uint64_t trial_index,
                       std::uint64_t stream = 0) {
    std::uint64_t h = mix(master_seed ^ 0x6a09e667f3bcc909ULL);
    h = mix(h ^ mix(trial_index + 0x9e3779b97f4a7c15ULL));
    h = mix(h ^ mix(stream + 0xbb67ae8584caa73bULL));
    return Rng(h);
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  /// Uniform on [0, 1) with 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on {0, ..., n-1}, unbiased (Lemire rejection).
  int next_below(int n) {
    if (n <= 0) throw std::invalid_argument("Rng::next_below: n must be positive");
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * bound;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
      const std::uint64_t threshold = (0ULL - bound) % bound;
      while (lo < threshold) {
        x = next_u64();
        m = static_cast<__uint128_t>(x) * bound;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<int>(m >> 64);
  }

  /// +1 or -1 with equal probability.
  double next_sign() { return (next_u64() >> 63) ? 1.0 : -1.0; }

  /// Standard normal via Box-Muller; consumes exactly two draws.
  double next_normal() {
    const double u1 = 1.0 - next_double();  // (0, 1]
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace srake

#endif  // SRAKE_RNG_HPP
