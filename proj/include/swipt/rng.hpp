// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "swipt/types.hpp"

namespace swipt {

// SplitMix64 step; used both as a stream deriver and to wash weak seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Deterministic per-task seed stream: hash(master, index) with no collisions
// across neighbouring indices.  Reductions over tasks must stay index-ordered
// so runs are reproducible regardless of scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master ^ (0xD1B54A32D192ED03ull * (index + 1));
  std::uint64_t a = splitmix64(s);
  std::uint64_t b = splitmix64(s);
  return a ^ (b << 1);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  // Uniform on (0, 1]; never returns 0 so it is safe under log().
  double uniform() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1p-53;
  }

  int bit() { return static_cast<int>(engine_() & 1ull); }

  // Integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = engine_();
      if (r >= threshold) return r % n;
    }
  }

  // Box-Muller; one draw per call keeps call sites order-independent.
  double gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Circularly symmetric complex Gaussian with E|x|^2 = 1.
  Complex cgaussian() {
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-std::log(u1));
    return Complex(r * std::cos(2.0 * std::numbers::pi * u2),
                   r * std::sin(2.0 * std::numbers::pi * u2));
  }

  CVec cgaussian_vector(Eigen::Index n) {
    CVec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = cgaussian();
    return v;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace swipt
