// SPDX-FileCopyrightText: 2026 The pluvia authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <random>
#include <string>
#include <vector>

#include "pluvia/envmap.hpp"
#include "pluvia/simulator.hpp"
#include "pluvia/types.hpp"

namespace pluvia {

/// One database sprite: grayscale streak radiance on a black background with
/// its alpha (equal to the normalized intensity, by the black-background
/// provenance of the source renders).
struct StreakTexture {
  Planef intensity;  // linear, [0, 1]
  Planef alpha;      // [0, 1], zero exactly where intensity is zero
  int model_index = 0;        // j in 1..20
  int oscillation_index = 0;  // k in 1..10

  // Bounding box of non-zero alpha (inclusive); the homography control
  // points live on this trimmed region.
  Eigen::Index trim_x0 = 0, trim_y0 = 0, trim_x1 = 0, trim_y1 = 0;

  double trim_width() const { return static_cast<double>(trim_x1 - trim_x0 + 1); }
  double trim_height() const { return static_cast<double>(trim_y1 - trim_y0 + 1); }
  /// Streak length over width of the trimmed sprite.
  double aspect() const { return trim_height() / trim_width(); }
};

/// 20 models x 10 oscillations of streak sprites, either loaded from a
/// directory of cv{j}_osc{k}.png files or procedurally generated.
class StreakDatabase {
 public:
  static constexpr int kModels = 20;
  static constexpr int kOscillations = 10;

  /// Load from `dir`; if the directory does not exist, falls back to the
  /// procedural database. A present but malformed directory is an error
  /// naming the offending file.
  static StreakDatabase load(const std::string& dir);
  static StreakDatabase load_directory(const std::string& dir);

  /// Deterministic synthetic database: anti-aliased vertical capsules with a
  /// Gaussian cross-section; oscillations are sinusoidal width-modulation
  /// phases. Model aspect ratios are log-spaced over [1.5, 40].
  static StreakDatabase procedural();

  const StreakTexture& texture(int model_j, int oscillation_k) const;
  double model_aspect(int model_j) const;
  std::size_t size() const { return textures_.size(); }

 private:
  std::vector<StreakTexture> textures_;  // (j-1) * kOscillations + (k-1)
  std::vector<double> model_aspects_;
};

/// A streak sprite positioned on the image: RGB radiance plus alpha, with
/// `origin_px` the image coordinate of sprite texel (0, 0).
struct RenderedStreak {
  Eigen::Vector2i origin_px = Eigen::Vector2i::Zero();
  std::array<Planef, 3> rgb;
  Planef alpha;
  StreakGeometry geometry;

  Eigen::Index width() const { return alpha.cols(); }
  Eigen::Index height() const { return alpha.rows(); }
};

/// Model whose aspect is closest to the given streak aspect; exact ties go to
/// the lower index.
int select_model_index(const StreakDatabase& db, double aspect);

/// Pick the model whose aspect best matches the streak geometry (ties to the
/// lower index) and a uniformly random oscillation.
const StreakTexture& select_streak(const StreakDatabase& db, const StreakGeometry& geometry,
                                   std::mt19937_64& rng);

/// Homography taking the trimmed sprite's start/end/width control points onto
/// the streak geometry (texture coordinates -> image coordinates). Degenerate
/// control points fall back to a similarity transform.
Eigen::Matrix3d streak_homography(const StreakTexture& tex, const StreakGeometry& geometry);

/// Warp the sprite through streak_homography with bilinear resampling.
RenderedStreak warp_streak(const StreakTexture& tex, const StreakGeometry& geometry);

/// Eq.-style photometry: the drop refracts 94% of its field-of-view radiance
/// and reflects 6% of the whole environment; per-channel multiply, alpha
/// untouched.
RenderedStreak shade_streak(RenderedStreak streak, const Rgb& fov_mean_radiance,
                            const Rgb& env_mean_radiance);
RenderedStreak shade_streak(RenderedStreak streak, const DropFovRegion& fov_region,
                            const EnvironmentMap& env);

/// Defocus blur-disk diameter in pixels for an object at distance d.
double circle_of_confusion_px(double depth_m, const CameraRig& rig);

/// Convolve sprite and alpha with a normalized disk of diameter `coc_px`
/// (padded support, energy-preserving); below 1 px this is a no-op.
RenderedStreak defocus_streak(const RenderedStreak& streak, double coc_px);

}  // namespace pluvia
