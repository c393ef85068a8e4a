// SPDX-FileCopyrightText: 2026 The pluvia authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include "pluvia/types.hpp"

namespace pluvia {

/// Latitude-longitude radiance panorama around the camera.
///
/// Texel (x, y) covers longitude [x, x+1) * 2pi/W - pi and latitude
/// pi/2 - [y, y+1) * pi/H; W = 2H. Directions are in the camera frame
/// (x right, y down, z forward), so latitude +pi/2 is -y (up) and
/// longitude 0 latitude 0 is the optical axis.
struct EnvironmentMap {
  LinearImage radiance;
  Eigen::VectorXd row_solid_angle_sr;  // per-texel solid angle, constant per row

  Eigen::Index width() const { return radiance.width(); }
  Eigen::Index height() const { return radiance.height(); }

  /// Direction of the texel center.
  Eigen::Vector3d direction(Eigen::Index x, Eigen::Index y) const {
    const double lon =
        (static_cast<double>(x) + 0.5) / static_cast<double>(width()) * 2.0 * M_PI - M_PI;
    const double lat = M_PI / 2.0 - (static_cast<double>(y) + 0.5) / static_cast<double>(height()) * M_PI;
    const double cl = std::cos(lat);
    return {cl * std::sin(lon), -std::sin(lat), cl * std::cos(lon)};
  }

  double solid_angle(Eigen::Index y) const { return row_solid_angle_sr[y]; }
  double total_solid_angle() const {
    return row_solid_angle_sr.sum() * static_cast<double>(width());
  }
};

/// Region of the panorama inside a drop's field of view.
struct DropFovRegion {
  MaskPlane mask;
  Rgb mean_radiance = Rgb::Zero();
};

/// Build a full-sphere panorama from a single frame: the camera frustum band
/// is an exact bilinear resampling of the image; remaining longitudes mirror-
/// tile it, and the polar caps stretch the top/bottom 10% of rows.
/// `out_height` must be >= 32 (and even, so hemispheres split cleanly).
EnvironmentMap estimate_environment(const LinearImage& img, const CameraRig& rig,
                                    int out_height = 128);

/// Solid-angle-weighted mean radiance over the masked texels.
/// Throws std::invalid_argument on an empty mask.
Rgb solid_angle_mean(const EnvironmentMap& env, const MaskPlane& mask);

/// Full-sphere weighted mean radiance.
Rgb solid_angle_mean(const EnvironmentMap& env);

/// Texels within `fov_deg / 2` of the camera-to-drop axis (the cone pointing
/// away from the camera). Drops are treated as co-located with the panorama
/// center, so the assumed scene-sphere radius `scene_distance_m` cancels out
/// of the mask; it is kept for an offset-aware extension.
/// `drop_position_cam` must be in front of the image plane (z > 0).
DropFovRegion drop_fov_region(const EnvironmentMap& env, const Eigen::Vector3d& drop_position_cam,
                              double fov_deg = 165.0, double scene_distance_m = 10.0);

/// k_sun times the solid-angle-weighted mean luminance of the upper hemisphere.
double estimate_sun_irradiance(const EnvironmentMap& env, double k_sun = 1.0);

/// Direction of the brightest upper-hemisphere texel (proxy sun direction for
/// the scattering phase). Deterministic first-max on ties.
Eigen::Vector3d brightest_sky_direction(const EnvironmentMap& env);

}  // namespace pluvia
