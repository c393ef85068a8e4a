// SPDX-FileCopyrightText: 2026 The pluvia authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "pluvia/types.hpp"

namespace pluvia {

/// Load an 8-bit sRGB raster (PNG or JPEG, detected by signature) and
/// linearize it. Channel white (255) maps to radiance 1.0.
/// Throws std::runtime_error naming the path on unreadable files or
/// unsupported bit depths.
LinearImage load_image(const std::string& path);

/// Clamp to [0, 1], apply the sRGB transfer and write an 8-bit raster.
/// Container is chosen by extension: .jpg/.jpeg writes JPEG, anything else PNG.
void save_image(const LinearImage& img, const std::string& path);

/// Load an 8-bit grayscale raster as raw values / 255, without any transfer
/// function (used for streak-database sprites, which store linear radiance).
Planef load_gray8(const std::string& path);

/// Load a metric depth map: either a 16-bit single-channel PNG scaled by
/// `unit_scale` (meters per stored unit, must be > 0) or a PFM float map
/// already in meters (`unit_scale` ignored). Zero/non-finite entries are
/// holes and get filled by nearest-valid propagation; an all-invalid map
/// throws.
DepthMap load_depth(const std::string& path, double unit_scale);

/// Write a depth map as 16-bit grayscale PNG, storing round(d / unit_scale)
/// per pixel (clamped to the uint16 range).
void save_depth_png16(const Planef& depth_m, const std::string& path, double unit_scale);

/// Write a depth map as a little-endian PFM float map in meters.
void save_depth_pfm(const Planef& depth_m, const std::string& path);

/// Parse a calibration text file of `key: value` lines. Recognized keys:
/// focal_length_m, f_number, exposure_s, focus_plane_m, principal_point_px
/// (2 values), pixels_per_meter, camera_height_m, ego_speed_mps, rotation
/// (9 values, row-major camera-to-world). Unknown keys are an error.
CameraRig load_camera_rig(const std::string& path);

}  // namespace pluvia
