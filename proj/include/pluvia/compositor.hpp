// SPDX-FileCopyrightText: 2026 The pluvia authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "pluvia/envmap.hpp"
#include "pluvia/simulator.hpp"
#include "pluvia/streaks.hpp"
#include "pluvia/types.hpp"

namespace pluvia {

/// Controls for rain rendering.
struct RainParams {
  double rate_mmph = 0.0;
  double hg_asymmetry = 0.9;                    // g of the Henyey-Greenstein phase
  double tau0_s = std::sqrt(1.0e-3) / 50.0;     // per-pixel dwell time in the source database
  bool depth_unit_km = true;                    // extinction exponent takes depth in km

  void validate() const {
    if (rate_mmph < 0.0) throw std::invalid_argument("RainParams: rate must be >= 0");
    if (!(tau0_s > 0.0)) throw std::invalid_argument("RainParams: tau0 must be > 0");
    if (!(hg_asymmetry > -1.0 && hg_asymmetry < 1.0))
      throw std::invalid_argument("RainParams: asymmetry must be in (-1, 1)");
  }
};

/// Homogeneous-fog controls (Koschmieder law).
struct FogParams {
  double max_visibility_m = 0.0;
  Rgb airlight = Rgb::Zero();
  static constexpr double kContrastThreshold = 0.05;

  double beta() const { return -std::log(kContrastThreshold) / max_visibility_m; }
  void validate() const {
    if (!(max_visibility_m > 0.0)) throw std::invalid_argument("FogParams: V_max must be > 0");
  }
};

/// Henyey-Greenstein phase function.
inline double henyey_greenstein(double cos_theta, double g) {
  const double denom = 1.0 + g * g - 2.0 * g * cos_theta;
  return (1.0 - g * g) / (4.0 * M_PI * std::pow(denom, 1.5));
}

/// Volumetric rain attenuation plus airlight: I_att = I * L_ext + A_in with
/// L_ext = exp(-0.312 R^0.67 d) (d in km) and A_in the Henyey-Greenstein
/// scattering of the estimated sun irradiance toward each pixel.
/// R = 0 returns the input bit-exactly.
LinearImage foglike_attenuation(const LinearImage& img, const DepthMap& depth,
                                const RainParams& params, double e_sun,
                                const Eigen::Vector3d& light_dir_cam, const CameraRig& rig);

/// Exposure-weighted blend of one rendered streak over the attenuated frame;
/// tau1 = T / max(1, streak length px), clipped to <= T.
void blend_streak_inplace(LinearImage& frame, const RenderedStreak& streak, double exposure_s,
                          double tau0_s);
LinearImage blend_streak(const LinearImage& base, const RenderedStreak& streak,
                         const CameraRig& rig, double tau0_s);

/// Scale so the output mean radiance equals the original's; a zero-mean
/// rained image is returned unchanged.
LinearImage restore_luminosity(const LinearImage& rained, const LinearImage& original);

/// Koschmieder fog: I * e^(-beta d) + airlight (1 - e^(-beta d)), depth in
/// meters. `beta_map` optionally overrides the homogeneous extinction with a
/// per-pixel value (heterogeneous-fog extension hook).
LinearImage render_fog(const LinearImage& img, const DepthMap& depth, const FogParams& fog,
                       const Planef* beta_map = nullptr);

/// Per-channel mean of the brightest 1% (by luminance) of the sky band (top
/// 20% of rows); falls back to the global 99th percentile when the sky band
/// carries no light.
Rgb estimate_airlight(const LinearImage& img);

struct AugmentOptions {
  RainParams rain;
  int env_height = 128;
  double k_sun = 1.0;
  double drop_fov_deg = 165.0;
  double scene_distance_m = 10.0;
  double sim_near_m = 0.5;
  double sim_far_m = 4.0;
  double sim_lateral_margin = 0.10;
};

/// Optional per-frame diagnostics from augment_frame.
struct AugmentTrace {
  std::size_t drops_simulated = 0;
  std::size_t streaks_visible = 0;
  std::size_t streaks_foglike = 0;
  double e_sun = 0.0;
  std::vector<StreakGeometry> visible;
};

/// Full rain pipeline on one frame: (1) fog-like attenuation, (2) per-drop
/// streak rendering and blending in far-to-near depth order, (3) global
/// luminosity restoration. Deterministic per seed; R = 0 is the identity.
LinearImage augment_frame(const LinearImage& img, const DepthMap& depth, const CameraRig& rig,
                          const AugmentOptions& options, const StreakDatabase& db,
                          std::uint64_t seed, AugmentTrace* trace = nullptr);

}  // namespace pluvia
