// SPDX-FileCopyrightText: 2026 The pluvia authors
// SPDX-License-Identifier: Apache-2.0

#include "pluvia/envmap.hpp"

#include <cmath>
#include <stdexcept>

namespace pluvia {
namespace {

// Clamped bilinear sample; pixel (i, j) sits at continuous coordinates (i, j).
Rgb bilinear(const LinearImage& img, double x, double y) {
  const double cx = std::clamp(x, 0.0, static_cast<double>(img.width() - 1));
  const double cy = std::clamp(y, 0.0, static_cast<double>(img.height() - 1));
  const Eigen::Index x0 = static_cast<Eigen::Index>(std::floor(cx));
  const Eigen::Index y0 = static_cast<Eigen::Index>(std::floor(cy));
  const Eigen::Index x1 = std::min(x0 + 1, img.width() - 1);
  const Eigen::Index y1 = std::min(y0 + 1, img.height() - 1);
  const float fx = static_cast<float>(cx - static_cast<double>(x0));
  const float fy = static_cast<float>(cy - static_cast<double>(y0));
  Rgb out;
  for (int c = 0; c < 3; ++c) {
    const auto& p = img.channel(c);
    const float top = p(y0, x0) * (1.0f - fx) + p(y0, x1) * fx;
    const float bot = p(y1, x0) * (1.0f - fx) + p(y1, x1) * fx;
    out[c] = top * (1.0f - fy) + bot * fy;
  }
  return out;
}

// Reflect a longitude into the band [-lam_left, lam_right] (mirror tiling).
double fold_longitude(double lon, double lam_left, double lam_right) {
  for (int guard = 0; guard < 64; ++guard) {
    if (lon > lam_right)
      lon = 2.0 * lam_right - lon;
    else if (lon < -lam_left)
      lon = -2.0 * lam_left - lon;
    else
      return lon;
  }
  return std::clamp(lon, -lam_left, lam_right);
}

}  // namespace

EnvironmentMap estimate_environment(const LinearImage& img, const CameraRig& rig, int out_height) {
  if (img.empty()) throw std::invalid_argument("estimate_environment: empty image");
  if (out_height < 32) throw std::invalid_argument("estimate_environment: out_height must be >= 32");
  if (out_height % 2 != 0) ++out_height;

  const Eigen::Index H = out_height;
  const Eigen::Index W = 2 * H;
  const double f = rig.focal_px();
  const Eigen::Vector2d pp = rig.principal_point(img.width(), img.height());
  const double w_max = static_cast<double>(img.width() - 1);
  const double h_max = static_cast<double>(img.height() - 1);

  // Horizontal FOV band limits where the pinhole x coordinate spans the image.
  const double lam_left = std::atan2(pp.x(), f);
  const double lam_right = std::atan2(w_max - pp.x(), f);
  const double cap_rows = 0.10 * h_max;

  EnvironmentMap env;
  env.radiance = LinearImage(W, H);
  env.row_solid_angle_sr.resize(H);
  for (Eigen::Index y = 0; y < H; ++y) {
    const double lat_hi = M_PI / 2.0 - static_cast<double>(y) / static_cast<double>(H) * M_PI;
    const double lat_lo = M_PI / 2.0 - static_cast<double>(y + 1) / static_cast<double>(H) * M_PI;
    env.row_solid_angle_sr[y] = 2.0 * M_PI / static_cast<double>(W) * (std::sin(lat_hi) - std::sin(lat_lo));
  }

  for (Eigen::Index y = 0; y < H; ++y) {
    const double lat = M_PI / 2.0 - (static_cast<double>(y) + 0.5) / static_cast<double>(H) * M_PI;
    for (Eigen::Index x = 0; x < W; ++x) {
      const double lon =
          (static_cast<double>(x) + 0.5) / static_cast<double>(W) * 2.0 * M_PI - M_PI;
      const double lam = fold_longitude(lon, lam_left, lam_right);
      const double cos_lam = std::cos(lam);
      const double ix = pp.x() + f * std::tan(lam);

      // Pinhole row for this latitude at the folded longitude; rows outside
      // the image come from the stretched 10% cap bands.
      const double iy = pp.y() - f * std::tan(lat) / cos_lam;
      double sy;
      if (iy < 0.0) {
        const double lat_top = std::atan2(pp.y() * cos_lam, f);
        const double t = (lat - lat_top) / (M_PI / 2.0 - lat_top);
        sy = cap_rows * std::clamp(t, 0.0, 1.0);
      } else if (iy > h_max) {
        const double lat_bot = -std::atan2((h_max - pp.y()) * cos_lam, f);
        const double t = (lat_bot - lat) / (lat_bot + M_PI / 2.0);
        sy = h_max - cap_rows * std::clamp(t, 0.0, 1.0);
      } else {
        sy = iy;
      }
      const Rgb v = bilinear(img, ix, sy);
      for (int c = 0; c < 3; ++c) env.radiance.channel(c)(y, x) = v[c];
    }
  }
  return env;
}

Rgb solid_angle_mean(const EnvironmentMap& env, const MaskPlane& mask) {
  if (mask.rows() != env.height() || mask.cols() != env.width())
    throw std::invalid_argument("solid_angle_mean: mask dimensions differ from map");
  Rgbd acc = Rgbd::Zero();
  double weight = 0.0;
  for (Eigen::Index y = 0; y < env.height(); ++y) {
    const double w = env.solid_angle(y);
    for (Eigen::Index x = 0; x < env.width(); ++x) {
      if (!mask(y, x)) continue;
      weight += w;
      for (int c = 0; c < 3; ++c)
        acc[c] += w * static_cast<double>(env.radiance.channel(c)(y, x));
    }
  }
  if (weight <= 0.0) throw std::invalid_argument("solid_angle_mean: empty mask");
  return (acc / weight).cast<float>();
}

Rgb solid_angle_mean(const EnvironmentMap& env) {
  Rgbd acc = Rgbd::Zero();
  double weight = 0.0;
  for (Eigen::Index y = 0; y < env.height(); ++y) {
    const double w = env.solid_angle(y);
    for (int c = 0; c < 3; ++c)
      acc[c] += w * env.radiance.channel(c).row(y).cast<double>().sum();
    weight += w * static_cast<double>(env.width());
  }
  return (acc / weight).cast<float>();
}

DropFovRegion drop_fov_region(const EnvironmentMap& env, const Eigen::Vector3d& drop_position_cam,
                              double fov_deg, double scene_distance_m) {
  if (!(drop_position_cam.z() > 0.0))
    throw std::invalid_argument("drop_fov_region: drop must be in front of the image plane");
  if (!(fov_deg > 0.0)) throw std::invalid_argument("drop_fov_region: fov must be > 0");
  (void)scene_distance_m;  // cancels under the co-located-drop approximation

  const Eigen::Vector3d axis = drop_position_cam.normalized();
  const double cos_half = std::cos(std::min(fov_deg, 360.0) * M_PI / 360.0);

  DropFovRegion region;
  region.mask = MaskPlane(env.height(), env.width());
  for (Eigen::Index y = 0; y < env.height(); ++y)
    for (Eigen::Index x = 0; x < env.width(); ++x)
      region.mask(y, x) = env.direction(x, y).dot(axis) >= cos_half;
  region.mean_radiance = solid_angle_mean(env, region.mask);
  return region;
}

double estimate_sun_irradiance(const EnvironmentMap& env, double k_sun) {
  double acc = 0.0, weight = 0.0;
  const Eigen::Index upper_rows = env.height() / 2;
  for (Eigen::Index y = 0; y < upper_rows; ++y) {
    const double w = env.solid_angle(y);
    for (Eigen::Index x = 0; x < env.width(); ++x) {
      const Rgb v = env.radiance.pixel(x, y);
      acc += w * static_cast<double>(luminance(v));
    }
    weight += w * static_cast<double>(env.width());
  }
  return weight > 0.0 ? k_sun * acc / weight : 0.0;
}

Eigen::Vector3d brightest_sky_direction(const EnvironmentMap& env) {
  Eigen::Index best_x = 0, best_y = 0;
  float best = -1.0f;
  const Eigen::Index upper_rows = env.height() / 2;
  for (Eigen::Index y = 0; y < upper_rows; ++y) {
    for (Eigen::Index x = 0; x < env.width(); ++x) {
      const float lum = luminance(env.radiance.pixel(x, y));
      if (lum > best) {
        best = lum;
        best_x = x;
        best_y = y;
      }
    }
  }
  return env.direction(best_x, best_y);
}

}  // namespace pluvia
