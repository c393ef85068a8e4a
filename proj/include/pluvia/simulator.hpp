// SPDX-FileCopyrightText: 2026 The pluvia authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "pluvia/types.hpp"

namespace pluvia {

// Only drops of 1 mm or more are simulated individually; smaller ones act as
// volumetric attenuation. The 0.5 mm floor is the analytic extrapolation
// bound used when quoting visible fractions of the full population.
inline constexpr double kMinSimulatedDiameterMm = 1.0;
inline constexpr double kMaxDropDiameterMm = 10.0;
inline constexpr double kPopulationFloorMm = 0.5;

/// Streaks imaging below this drop diameter are fog-like, not rendered.
inline constexpr float kVisiblePxThreshold = 1.0f;

/// Camera-frustum simulation volume. Drops live between `near_m` and `far_m`
/// along the optical axis, laterally covering the field of view plus margin.
struct SimVolume {
  double near_m = 0.5;
  double far_m = 4.0;
  double lateral_margin = 0.10;
  double tan_x = 0.0;  // frustum half-extent slopes, margin included
  double tan_y = 0.0;

  static SimVolume for_camera(const CameraRig& rig, Eigen::Index width, Eigen::Index height,
                              double near_m = 0.5, double far_m = 4.0, double margin = 0.10);

  double volume_m3() const {
    return 4.0 / 3.0 * tan_x * tan_y * (far_m * far_m * far_m - near_m * near_m * near_m);
  }
  void validate() const;
};

/// One simulated raindrop in the camera frame. Velocity is terminal fall
/// minus camera ego motion, already rotated into the camera frame.
struct Drop {
  Eigen::Vector3f position_m;
  float diameter_mm;
  Eigen::Vector3f velocity_mps;
};

struct RainState {
  double rate_mmph = 0.0;
  std::uint64_t seed = 0;
  SimVolume volume;
  std::vector<Drop> drops;
};

/// Image-space streak segment of one drop over the exposure.
struct StreakGeometry {
  Eigen::Vector2f start_px;
  Eigen::Vector2f end_px;
  float image_diameter_px = 0.0f;
  float depth_m = 0.0f;

  float length_px() const { return (end_px - start_px).matrix().norm(); }
};

/// Poisson mean of the simulated (>= 1 mm) population over the volume.
double expected_drop_count(double rate_mmph, const SimVolume& volume);

/// Sample the drop population: count ~ Poisson(V * integral of N), diameters
/// i.i.d. truncated-exponential on [1, 10] mm, positions uniform in the
/// frustum, fall speed at terminal velocity. Bit-deterministic per seed.
RainState sample_drops(double rate_mmph, const CameraRig& rig, const SimVolume& volume,
                       std::uint64_t seed);

/// Project every drop to its streak segment; drops behind the camera or with
/// streaks entirely outside the image are culled.
std::vector<StreakGeometry> project_streaks(const RainState& state, const CameraRig& rig,
                                            Eigen::Index width, Eigen::Index height);

struct DropClasses {
  std::vector<StreakGeometry> foglike;
  std::vector<StreakGeometry> visible;
};

/// Split streaks at the 1-pixel imaging threshold; fog-like drops are carried
/// by the volumetric attenuation instead of being rendered.
DropClasses classify_drops(const std::vector<StreakGeometry>& streaks);

/// Fraction of the full drop population (extrapolated down to
/// kPopulationFloorMm) whose streaks image at >= 1 px.
double visible_drop_fraction(const RainState& state, std::size_t visible_count);

}  // namespace pluvia
