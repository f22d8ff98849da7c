/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace dial {

/// Seeded PRNG with a Gaussian that is fixed across platforms.
///
/// std::mt19937_64 output is pinned by the standard, but the standard
/// distributions are not, so uniform and normal variates are derived here by
/// hand (53-bit mantissa, Box-Muller cosine branch).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on (0, 1].
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * (1.0 - uniform()); }

  /// No engine draws when sigma is zero.
  double normal(double mean, double sigma) {
    if (sigma == 0.0) return mean;
    const double u1 = uniform();
    const double u2 = uniform();
    return mean + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dial
