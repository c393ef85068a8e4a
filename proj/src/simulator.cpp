// SPDX-FileCopyrightText: 2026 The pluvia authors
// SPDX-License-Identifier: Apache-2.0

#include "pluvia/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pluvia/rain_physics.hpp"
#include "pluvia/random.hpp"

namespace pluvia {

SimVolume SimVolume::for_camera(const CameraRig& rig, Eigen::Index width, Eigen::Index height,
                                double near_m, double far_m, double margin) {
  SimVolume v;
  v.near_m = near_m;
  v.far_m = far_m;
  v.lateral_margin = margin;
  const double f = rig.focal_px();
  v.tan_x = static_cast<double>(width) / 2.0 / f * (1.0 + margin);
  v.tan_y = static_cast<double>(height) / 2.0 / f * (1.0 + margin);
  v.validate();
  return v;
}

void SimVolume::validate() const {
  if (!(far_m > near_m) || !(near_m > 0.0))
    throw std::invalid_argument("SimVolume: requires far > near > 0");
  if (!(tan_x > 0.0) || !(tan_y > 0.0))
    throw std::invalid_argument("SimVolume: empty lateral extent");
}

double expected_drop_count(double rate_mmph, const SimVolume& volume) {
  return volume.volume_m3() *
         drop_density_between(rate_mmph, kMinSimulatedDiameterMm, kMaxDropDiameterMm);
}

RainState sample_drops(double rate_mmph, const CameraRig& rig, const SimVolume& volume,
                       std::uint64_t seed) {
  if (rate_mmph < 0.0) throw std::invalid_argument("sample_drops: rate must be >= 0");
  volume.validate();

  RainState state;
  state.rate_mmph = rate_mmph;
  state.seed = seed;
  state.volume = volume;
  if (rate_mmph == 0.0) return state;  // dry sky, nothing to simulate

  std::mt19937_64 rng(seed);
  const double lambda = marshall_palmer_lambda(rate_mmph);
  const std::uint64_t count = poisson_sample(rng, expected_drop_count(rate_mmph, volume));
  state.drops.reserve(count);

  // Ego motion: the camera translates along its forward axis, so in the
  // camera frame every drop picks up -ego_speed along z.
  const Eigen::Matrix3d world_to_cam = rig.cam_to_world.transpose();
  const double near3 = volume.near_m * volume.near_m * volume.near_m;
  const double far3 = volume.far_m * volume.far_m * volume.far_m;

  for (std::uint64_t i = 0; i < count; ++i) {
    // Uniform in the frustum: z density grows as z^2.
    const double z = std::cbrt(near3 + uniform_unit(rng) * (far3 - near3));
    const double x = (2.0 * uniform_unit(rng) - 1.0) * volume.tan_x * z;
    const double y = (2.0 * uniform_unit(rng) - 1.0) * volume.tan_y * z;
    const double d_mm =
        truncated_exp_sample(rng, lambda, kMinSimulatedDiameterMm, kMaxDropDiameterMm);

    const Eigen::Vector3d fall_world(0.0, terminal_velocity_mps(d_mm), 0.0);  // +y is down
    const Eigen::Vector3d vel_cam =
        world_to_cam * fall_world - Eigen::Vector3d(0.0, 0.0, rig.ego_speed_mps);

    Drop drop;
    drop.position_m = Eigen::Vector3f(static_cast<float>(x), static_cast<float>(y),
                                      static_cast<float>(z));
    drop.diameter_mm = static_cast<float>(d_mm);
    drop.velocity_mps = vel_cam.cast<float>();
    state.drops.push_back(drop);
  }
  return state;
}

std::vector<StreakGeometry> project_streaks(const RainState& state, const CameraRig& rig,
                                            Eigen::Index width, Eigen::Index height) {
  std::vector<StreakGeometry> out;
  out.reserve(state.drops.size());
  const Eigen::Vector2d pp = rig.principal_point(width, height);
  const double f = rig.focal_px();
  const double T = rig.exposure_s;

  for (const Drop& drop : state.drops) {
    const Eigen::Vector3d p0 = drop.position_m.cast<double>();
    const Eigen::Vector3d p1 = p0 + drop.velocity_mps.cast<double>() * T;
    if (p0.z() <= 1.0e-3 || p1.z() <= 1.0e-3) continue;  // behind or on the image plane

    StreakGeometry g;
    g.start_px = project_point(rig, pp, p0).cast<float>();
    g.end_px = project_point(rig, pp, p1).cast<float>();
    g.depth_m = static_cast<float>(p0.z());
    g.image_diameter_px = static_cast<float>(drop.diameter_mm * 1.0e-3 * f / p0.z());

    // Cull streaks whose padded bounding box misses the image entirely.
    const float pad = g.image_diameter_px * 0.5f + 1.0f;
    const float x_lo = std::min(g.start_px.x(), g.end_px.x()) - pad;
    const float x_hi = std::max(g.start_px.x(), g.end_px.x()) + pad;
    const float y_lo = std::min(g.start_px.y(), g.end_px.y()) - pad;
    const float y_hi = std::max(g.start_px.y(), g.end_px.y()) + pad;
    if (x_hi < 0.0f || x_lo > static_cast<float>(width - 1) || y_hi < 0.0f ||
        y_lo > static_cast<float>(height - 1))
      continue;
    out.push_back(g);
  }
  return out;
}

DropClasses classify_drops(const std::vector<StreakGeometry>& streaks) {
  DropClasses classes;
  for (const StreakGeometry& g : streaks) {
    if (g.image_diameter_px >= kVisiblePxThreshold)
      classes.visible.push_back(g);
    else
      classes.foglike.push_back(g);
  }
  return classes;
}

double visible_drop_fraction(const RainState& state, std::size_t visible_count) {
  const double submm = state.volume.volume_m3() *
                       drop_density_between(state.rate_mmph, kPopulationFloorMm,
                                            kMinSimulatedDiameterMm);
  const double total = static_cast<double>(state.drops.size()) + submm;
  return total > 0.0 ? static_cast<double>(visible_count) / total : 0.0;
}

}  // namespace pluvia
