// SPDX-FileCopyrightText: 2026 The pluvia authors
// SPDX-License-Identifier: Apache-2.0

#include "pluvia/compositor.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "pluvia/random.hpp"

namespace pluvia {
namespace {

void require_aligned(const LinearImage& img, const DepthMap& depth) {
  if (img.height() != depth.rows() || img.width() != depth.cols())
    throw std::invalid_argument("image and depth dimensions differ");
}

}  // namespace

LinearImage foglike_attenuation(const LinearImage& img, const DepthMap& depth,
                                const RainParams& params, double e_sun,
                                const Eigen::Vector3d& light_dir_cam, const CameraRig& rig) {
  require_aligned(img, depth);
  params.validate();
  const Eigen::Index w = img.width(), h = img.height();

  const double coef =
      params.rate_mmph > 0.0 ? 0.312 * std::pow(params.rate_mmph, 0.67) : 0.0;
  const float depth_scale = params.depth_unit_km ? 1.0e-3f : 1.0f;
  const Planef l_ext = (-static_cast<float>(coef) * depth_scale * depth).exp();

  // Per-pixel scattering angle between the view ray and the light direction.
  const Eigen::Vector2d pp = rig.principal_point(w, h);
  const float f = static_cast<float>(rig.focal_px());
  const Planef xs = (Eigen::RowVectorXf::LinSpaced(w, 0.0f, static_cast<float>(w - 1)).array() -
                     static_cast<float>(pp.x()))
                        .replicate(h, 1) /
                    f;
  const Planef ys = (Eigen::VectorXf::LinSpaced(h, 0.0f, static_cast<float>(h - 1)).array() -
                     static_cast<float>(pp.y()))
                        .replicate(1, w) /
                    f;
  const Eigen::Vector3d l = light_dir_cam.normalized();
  const Planef inv_norm = (xs * xs + ys * ys + 1.0f).sqrt().inverse();
  const Planef cos_theta =
      (xs * static_cast<float>(l.x()) + ys * static_cast<float>(l.y()) + static_cast<float>(l.z())) *
      inv_norm;

  const float g = static_cast<float>(params.hg_asymmetry);
  const Planef phase =
      (1.0f - g * g) /
      (4.0f * static_cast<float>(M_PI) * (1.0f + g * g - 2.0f * g * cos_theta).pow(1.5f));
  const Planef airlight = phase * static_cast<float>(e_sun) * (1.0f - l_ext);

  LinearImage out(w, h);
  for (int c = 0; c < 3; ++c) out.channel(c) = img.channel(c) * l_ext + airlight;
  return out;
}

void blend_streak_inplace(LinearImage& frame, const RenderedStreak& streak, double exposure_s,
                          double tau0_s) {
  const float T = static_cast<float>(exposure_s);
  const float len = std::max(1.0f, streak.geometry.length_px());
  const float tau1 = std::min(T, T / len);
  const float gain = static_cast<float>(tau1 / tau0_s);

  const Eigen::Index w = frame.width(), h = frame.height();
  for (Eigen::Index sy = 0; sy < streak.height(); ++sy) {
    const Eigen::Index iy = sy + streak.origin_px.y();
    if (iy < 0 || iy >= h) continue;
    for (Eigen::Index sx = 0; sx < streak.width(); ++sx) {
      const Eigen::Index ix = sx + streak.origin_px.x();
      if (ix < 0 || ix >= w) continue;
      const float alpha = std::clamp(streak.alpha(sy, sx), 0.0f, 1.0f);
      const float w_bg = (T - alpha * tau1) / T;
      for (int c = 0; c < 3; ++c) {
        float& px = frame.channel(c)(iy, ix);
        px = w_bg * px + streak.rgb[static_cast<std::size_t>(c)](sy, sx) * gain;
      }
    }
  }
}

LinearImage blend_streak(const LinearImage& base, const RenderedStreak& streak,
                         const CameraRig& rig, double tau0_s) {
  LinearImage out = base;
  blend_streak_inplace(out, streak, rig.exposure_s, tau0_s);
  return out;
}

LinearImage restore_luminosity(const LinearImage& rained, const LinearImage& original) {
  if (!rained.same_shape(original))
    throw std::invalid_argument("restore_luminosity: dimensions differ");
  const double mean_rained = rained.mean();
  if (mean_rained <= 0.0) return rained;
  const float scale = static_cast<float>(original.mean() / mean_rained);
  LinearImage out(rained.width(), rained.height());
  for (int c = 0; c < 3; ++c) out.channel(c) = rained.channel(c) * scale;
  return out;
}

LinearImage render_fog(const LinearImage& img, const DepthMap& depth, const FogParams& fog,
                       const Planef* beta_map) {
  require_aligned(img, depth);
  fog.validate();
  Planef transmission;
  if (beta_map) {
    if (beta_map->rows() != depth.rows() || beta_map->cols() != depth.cols())
      throw std::invalid_argument("render_fog: beta map dimensions differ");
    transmission = (-(*beta_map) * depth).exp();
  } else {
    transmission = (-static_cast<float>(fog.beta()) * depth).exp();
  }
  LinearImage out(img.width(), img.height());
  for (int c = 0; c < 3; ++c)
    out.channel(c) = img.channel(c) * transmission + fog.airlight[c] * (1.0f - transmission);
  return out;
}

Rgb estimate_airlight(const LinearImage& img) {
  if (img.empty()) return Rgb::Zero();
  const Planef lum = luminance(img);

  auto brightest_mean = [&](Eigen::Index row_begin, Eigen::Index row_end) -> std::pair<Rgb, float> {
    std::vector<std::pair<float, Eigen::Index>> px;
    px.reserve(static_cast<std::size_t>((row_end - row_begin) * img.width()));
    for (Eigen::Index y = row_begin; y < row_end; ++y)
      for (Eigen::Index x = 0; x < img.width(); ++x)
        px.emplace_back(lum(y, x), y * img.width() + x);
    const std::size_t keep = std::max<std::size_t>(1, px.size() / 100);
    std::nth_element(px.begin(), px.begin() + static_cast<std::ptrdiff_t>(keep - 1), px.end(),
                     [](const auto& a, const auto& b) {
                       return a.first != b.first ? a.first > b.first : a.second < b.second;
                     });
    Rgbd acc = Rgbd::Zero();
    float max_lum = 0.0f;
    for (std::size_t i = 0; i < keep; ++i) {
      const Eigen::Index y = px[i].second / img.width(), x = px[i].second % img.width();
      acc += img.pixel(x, y).cast<double>();
      max_lum = std::max(max_lum, px[i].first);
    }
    return {(acc / static_cast<double>(keep)).cast<float>(), max_lum};
  };

  const Eigen::Index sky_rows = std::max<Eigen::Index>(1, img.height() / 5);
  const auto [sky, sky_max] = brightest_mean(0, sky_rows);
  if (sky_max > 0.0f) return sky;
  return brightest_mean(0, img.height()).first;  // dark sky band: global 99th percentile
}

LinearImage augment_frame(const LinearImage& img, const DepthMap& depth, const CameraRig& rig,
                          const AugmentOptions& options, const StreakDatabase& db,
                          std::uint64_t seed, AugmentTrace* trace) {
  require_aligned(img, depth);
  options.rain.validate();
  rig.validate();
  if (options.rain.rate_mmph <= 0.0) return img;  // zero-rain identity

  const EnvironmentMap env = estimate_environment(img, rig, options.env_height);
  const double e_sun = estimate_sun_irradiance(env, options.k_sun);
  const Eigen::Vector3d light = brightest_sky_direction(env);
  const Rgb env_mean = solid_angle_mean(env);

  LinearImage frame = foglike_attenuation(img, depth, options.rain, e_sun, light, rig);

  const SimVolume volume =
      SimVolume::for_camera(rig, img.width(), img.height(), options.sim_near_m, options.sim_far_m,
                            options.sim_lateral_margin);
  const RainState state = sample_drops(options.rain.rate_mmph, rig, volume, seed);
  const std::vector<StreakGeometry> streaks =
      project_streaks(state, rig, img.width(), img.height());
  DropClasses classes = classify_drops(streaks);

  // Far to near, so closer streaks composite over farther ones. Stable sort
  // keeps equal depths in sampling order for determinism.
  std::stable_sort(classes.visible.begin(), classes.visible.end(),
                   [](const StreakGeometry& a, const StreakGeometry& b) {
                     return a.depth_m > b.depth_m;
                   });

  if (trace) {
    trace->drops_simulated = state.drops.size();
    trace->streaks_visible = classes.visible.size();
    trace->streaks_foglike = classes.foglike.size();
    trace->e_sun = e_sun;
    trace->visible = classes.visible;
  }

  const Eigen::Vector2d pp = rig.principal_point(img.width(), img.height());
  std::mt19937_64 osc_rng(seed ^ 0x9e3779b97f4a7c15ull);
  for (const StreakGeometry& geom : classes.visible) {
    const StreakTexture& tex = select_streak(db, geom, osc_rng);

    // The drop sits on the start pixel's view ray at the streak depth.
    const Eigen::Vector3d drop_pos =
        view_ray(rig, pp, geom.start_px.x(), geom.start_px.y()) * static_cast<double>(geom.depth_m);
    const DropFovRegion fov =
        drop_fov_region(env, drop_pos, options.drop_fov_deg, options.scene_distance_m);

    RenderedStreak sprite = shade_streak(warp_streak(tex, geom), fov.mean_radiance, env_mean);
    const double coc = circle_of_confusion_px(geom.depth_m, rig);
    sprite = defocus_streak(sprite, coc);
    blend_streak_inplace(frame, sprite, rig.exposure_s, options.rain.tau0_s);
  }

  return restore_luminosity(frame, img);
}

}  // namespace pluvia
