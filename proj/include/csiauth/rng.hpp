// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace csiauth {

/// SplitMix64 finalizer; used to derive independent child seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic child seed for worker/cell `index` under a master seed.
/// The mapping is pure, so results do not depend on worker count or
/// completion order.
std::uint64_t child_seed(std::uint64_t master, std::uint64_t index);

/// Seeded random source with fully specified output bits.
///
/// The engine is std::mt19937_64 (bit-exact across platforms per the
/// standard) and all distributions are generated explicitly on top of its
/// raw output: uniforms via the top 53 bits, complex Gaussians via
/// Box-Muller on two uniforms per complex sample. No platform-defined
/// std:: distribution is used anywhere.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1).
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Circularly symmetric complex Gaussian CN(0, variance);
    /// real and imaginary parts each N(0, variance / 2).
    std::complex<double> complex_gaussian(double variance);

  private:
    std::mt19937_64 gen_;
};

}  // namespace csiauth
