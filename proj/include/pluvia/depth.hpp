// SPDX-FileCopyrightText: 2026 The pluvia authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "pluvia/types.hpp"

namespace pluvia {

/// Smallest depth the pipeline will ever report, in meters. Edge refinement
/// clamps here so downstream 1/d math stays finite.
inline constexpr float kMinDepthM = 1.0e-3f;

/// Normalized box mean with window half-width `radius`; windows are clipped
/// at the borders and divided by their in-bounds area.
Planef box_filter(const Planef& src, int radius);

/// Replace non-finite or <= 0 entries by the value of the nearest valid
/// pixel (multi-source BFS, deterministic scan order). Throws if no pixel
/// is valid.
DepthMap fill_depth_holes(const Planef& raw);

/// Edge-aware depth smoothing: local linear model of depth on the guide's
/// luminance (He-style guided filter). Relocates depth edges onto guide
/// edges; preserves constants; output is clamped strictly positive.
/// Throws std::invalid_argument when radius < 1 or radius >= min(w, h) / 2.
DepthMap refine_depth_edges(const DepthMap& depth, const LinearImage& guide, int radius,
                            float eps);

}  // namespace pluvia
