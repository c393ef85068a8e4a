// SPDX-FileCopyrightText: 2026 The pluvia authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <stdexcept>

namespace pluvia {

// Marshall-Palmer (1948) drop-size law and Atlas (1973) terminal-velocity fit,
// the canonical constants for the Ottawa measurements.

inline constexpr double kMarshallPalmerN0 = 8000.0;  // drops / m^3 / mm

/// Exponential slope of the drop-size density, mm^-1.
inline double marshall_palmer_lambda(double rate_mmph) {
  if (!(rate_mmph > 0.0)) throw std::invalid_argument("marshall_palmer: rate must be > 0");
  return 4.1 * std::pow(rate_mmph, -0.21);
}

/// Number density N(D) = N0 exp(-lambda D), drops / m^3 / mm.
inline double marshall_palmer_density(double rate_mmph, double diameter_mm) {
  return kMarshallPalmerN0 * std::exp(-marshall_palmer_lambda(rate_mmph) * diameter_mm);
}

/// Integral of N(D) over [lo, hi] mm: drops per m^3 in that diameter band.
inline double drop_density_between(double rate_mmph, double lo_mm, double hi_mm) {
  const double lambda = marshall_palmer_lambda(rate_mmph);
  return kMarshallPalmerN0 / lambda * (std::exp(-lambda * lo_mm) - std::exp(-lambda * hi_mm));
}

/// Terminal fall speed, m/s; saturates just below 9.65 m/s for large drops.
inline double terminal_velocity_mps(double diameter_mm) {
  return std::max(0.0, 9.65 - 10.3 * std::exp(-0.6 * diameter_mm));
}

}  // namespace pluvia
