// SPDX-FileCopyrightText: 2026 The pluvia authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace pluvia {

// std::mt19937_64 output is pinned by the standard, but the standard library
// *distributions* are not, so every variate transform the engine feeds lives
// here. This keeps sampled drop populations bit-identical across platforms.

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(std::mt19937_64& rng, double lo, double hi) {
  return lo + uniform_unit(rng) * (hi - lo);
}

/// Inverse-CDF sample of an exponential with rate `lambda` truncated to [lo, hi].
inline double truncated_exp_sample(std::mt19937_64& rng, double lambda, double lo, double hi) {
  const double elo = std::exp(-lambda * lo);
  const double ehi = std::exp(-lambda * hi);
  const double u = uniform_unit(rng);
  return -std::log(elo - u * (elo - ehi)) / lambda;
}

/// CDF of the truncated exponential above; the sampling oracle for tests.
inline double truncated_exp_cdf(double x, double lambda, double lo, double hi) {
  if (x <= lo) return 0.0;
  if (x >= hi) return 1.0;
  const double elo = std::exp(-lambda * lo);
  const double ehi = std::exp(-lambda * hi);
  return (elo - std::exp(-lambda * x)) / (elo - ehi);
}

namespace detail {

inline std::uint64_t poisson_knuth(std::mt19937_64& rng, double mean) {
  const double limit = std::exp(-mean);
  std::uint64_t k = 0;
  double prod = uniform_unit(rng);
  while (prod > limit) {
    ++k;
    prod *= uniform_unit(rng);
  }
  return k;
}

// Hormann's PTRS transformed-rejection sampler; exact for mean >= 10.
inline std::uint64_t poisson_ptrs(std::mt19937_64& rng, double mean) {
  const double log_mean = std::log(mean);
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform_unit(rng) - 0.5;
    const double v = uniform_unit(rng);
    const double us = 0.5 - std::abs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const double k = kf;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_mean - mean - std::lgamma(k + 1.0))
      return static_cast<std::uint64_t>(kf);
  }
}

}  // namespace detail

/// Poisson variate with the given mean (mean >= 0).
inline std::uint64_t poisson_sample(std::mt19937_64& rng, double mean) {
  if (mean <= 0.0) return 0;
  if (mean < 10.0) return detail::poisson_knuth(rng, mean);
  return detail::poisson_ptrs(rng, mean);
}

/// FNV-1a 64-bit hash; stable across platforms, used to derive per-frame seeds.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ull) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace pluvia
