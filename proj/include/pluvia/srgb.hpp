// SPDX-FileCopyrightText: 2026 The pluvia authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "pluvia/types.hpp"

namespace pluvia {

// IEC 61966-2-1 transfer functions. All photometric math in the library runs
// in linear radiance; these are applied only at image ingestion/output.

inline double srgb_to_linear(double u) {
  return u <= 0.04045 ? u / 12.92 : std::pow((u + 0.055) / 1.055, 2.4);
}

inline double linear_to_srgb(double v) {
  if (v <= 0.0) return 0.0;
  if (v >= 1.0) return 1.0;
  return v <= 0.0031308 ? 12.92 * v : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

inline float srgb_byte_to_linear(std::uint8_t b) {
  return static_cast<float>(srgb_to_linear(b / 255.0));
}

inline std::uint8_t linear_to_srgb_byte(double v) {
  const double s = linear_to_srgb(std::clamp(v, 0.0, 1.0));
  return static_cast<std::uint8_t>(std::lround(s * 255.0));
}

}  // namespace pluvia
