// SPDX-FileCopyrightText: 2026 The pluvia authors
// SPDX-License-Identifier: Apache-2.0

#include "pluvia/streaks.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "pluvia/image_io.hpp"
#include "pluvia/random.hpp"

namespace pluvia {
namespace {

void compute_trim(StreakTexture& tex) {
  const Eigen::Index h = tex.alpha.rows(), w = tex.alpha.cols();
  Eigen::Index x0 = w, x1 = -1, y0 = h, y1 = -1;
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      if (tex.alpha(y, x) > 0.0f) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
      }
    }
  }
  if (x1 < 0) {  // fully transparent sprite: trim to the whole canvas
    x0 = 0;
    y0 = 0;
    x1 = w - 1;
    y1 = h - 1;
  }
  tex.trim_x0 = x0;
  tex.trim_y0 = y0;
  tex.trim_x1 = x1;
  tex.trim_y1 = y1;
}

StreakTexture make_procedural_texture(int model_j, int oscillation_k, double aspect) {
  constexpr Eigen::Index kWidth = 17;  // odd, so the centerline sits on a texel
  constexpr Eigen::Index kPad = 4;
  const Eigen::Index body_len =
      std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::lround(aspect * kWidth)),
                               kWidth + 2, 680);
  const Eigen::Index w = kWidth + 2 * kPad;
  const Eigen::Index h = body_len + 2 * kPad;

  StreakTexture tex;
  tex.model_index = model_j;
  tex.oscillation_index = oscillation_k;
  tex.intensity = Planef::Zero(h, w);

  const double cx = static_cast<double>(w - 1) / 2.0;
  const double y_top = kPad;
  const double y_bot = kPad + body_len - 1;
  const double phase = static_cast<double>(oscillation_k - 1) / 10.0;

  float peak = 0.0f;
  for (Eigen::Index y = 0; y < h; ++y) {
    // Nearest point on the capsule spine and the width modulation there.
    const double yc = std::clamp(static_cast<double>(y), y_top, y_bot);
    const double t = (yc - y_top) / std::max(1.0, y_bot - y_top);
    const double half_w =
        (static_cast<double>(kWidth) / 2.0) * (1.0 + 0.18 * std::sin(2.0 * M_PI * (2.0 * t + phase)));
    const double sigma = std::max(0.6, half_w / 2.0);
    for (Eigen::Index x = 0; x < w; ++x) {
      const double dx = static_cast<double>(x) - cx;
      const double dy = static_cast<double>(y) - yc;
      const double r2 = dx * dx + dy * dy;
      const float v = static_cast<float>(std::exp(-r2 / (2.0 * sigma * sigma)));
      tex.intensity(y, x) = v;
      peak = std::max(peak, v);
    }
  }
  if (peak > 0.0f) tex.intensity /= peak;
  // Quantization floor mirrors the 8-bit provenance of the real database and
  // keeps alpha exactly zero on the background.
  tex.intensity = (tex.intensity < 1.0f / 255.0f).select(0.0f, tex.intensity);
  tex.alpha = tex.intensity;
  compute_trim(tex);
  return tex;
}

// Exact 4-point homography (h33 = 1): rows of the 8x8 DLT system.
Eigen::Matrix3d solve_homography(const Eigen::Matrix<double, 4, 2>& src,
                                 const Eigen::Matrix<double, 4, 2>& dst) {
  Eigen::Matrix<double, 8, 8> A;
  Eigen::Matrix<double, 8, 1> rhs;
  for (int i = 0; i < 4; ++i) {
    const double u = src(i, 0), v = src(i, 1);
    const double x = dst(i, 0), y = dst(i, 1);
    A.row(2 * i) << u, v, 1, 0, 0, 0, -x * u, -x * v;
    A.row(2 * i + 1) << 0, 0, 0, u, v, 1, -y * u, -y * v;
    rhs(2 * i) = x;
    rhs(2 * i + 1) = y;
  }
  const Eigen::FullPivLU<Eigen::Matrix<double, 8, 8>> lu(A);
  if (!lu.isInvertible()) throw std::domain_error("degenerate homography");
  const Eigen::Matrix<double, 8, 1> hv = lu.solve(rhs);
  Eigen::Matrix3d H;
  H << hv(0), hv(1), hv(2), hv(3), hv(4), hv(5), hv(6), hv(7), 1.0;
  return H;
}

Eigen::Matrix3d similarity_transform(const Eigen::Vector2d& t0, const Eigen::Vector2d& t1,
                                     const Eigen::Vector2d& s, const Eigen::Vector2d& e) {
  const Eigen::Vector2d dt = t1 - t0;
  const Eigen::Vector2d dg = e - s;
  double scale = 1.0;
  double angle = 0.0;
  if (dt.norm() > 1.0e-9 && dg.norm() > 1.0e-9) {
    scale = dg.norm() / dt.norm();
    angle = std::atan2(dg.y(), dg.x()) - std::atan2(dt.y(), dt.x());
  }
  const double ca = std::cos(angle) * scale, sa = std::sin(angle) * scale;
  Eigen::Matrix3d M = Eigen::Matrix3d::Identity();
  M(0, 0) = ca;
  M(0, 1) = -sa;
  M(1, 0) = sa;
  M(1, 1) = ca;
  const Eigen::Vector2d t = s - Eigen::Vector2d(M(0, 0) * t0.x() + M(0, 1) * t0.y(),
                                                M(1, 0) * t0.x() + M(1, 1) * t0.y());
  M(0, 2) = t.x();
  M(1, 2) = t.y();
  return M;
}

float sample_zero_padded(const Planef& p, double x, double y) {
  if (x < -1.0 || y < -1.0 || x > static_cast<double>(p.cols()) ||
      y > static_cast<double>(p.rows()))
    return 0.0f;
  const Eigen::Index x0 = static_cast<Eigen::Index>(std::floor(x));
  const Eigen::Index y0 = static_cast<Eigen::Index>(std::floor(y));
  const float fx = static_cast<float>(x - static_cast<double>(x0));
  const float fy = static_cast<float>(y - static_cast<double>(y0));
  auto at = [&](Eigen::Index yy, Eigen::Index xx) -> float {
    if (yy < 0 || xx < 0 || yy >= p.rows() || xx >= p.cols()) return 0.0f;
    return p(yy, xx);
  };
  const float top = at(y0, x0) * (1.0f - fx) + at(y0, x0 + 1) * fx;
  const float bot = at(y0 + 1, x0) * (1.0f - fx) + at(y0 + 1, x0 + 1) * fx;
  return top * (1.0f - fy) + bot * fy;
}

}  // namespace

StreakDatabase StreakDatabase::load(const std::string& dir) {
  if (!std::filesystem::is_directory(dir)) return procedural();
  return load_directory(dir);
}

StreakDatabase StreakDatabase::load_directory(const std::string& dir) {
  StreakDatabase db;
  db.textures_.reserve(static_cast<std::size_t>(kModels * kOscillations));
  for (int j = 1; j <= kModels; ++j) {
    for (int k = 1; k <= kOscillations; ++k) {
      const std::string path =
          (std::filesystem::path(dir) / ("cv" + std::to_string(j) + "_osc" + std::to_string(k) + ".png"))
              .string();
      if (!std::filesystem::exists(path))
        throw std::runtime_error(path + ": missing streak database file");

      StreakTexture tex;
      tex.model_index = j;
      tex.oscillation_index = k;
      // Sprites store raw 8-bit radiance on black, no transfer function.
      tex.intensity = load_gray8(path);
      const float peak = tex.intensity.maxCoeff();
      tex.alpha = peak > 0.0f ? Planef((tex.intensity / peak).cwiseMin(1.0f)) : tex.intensity;
      // Black background rule: alpha vanishes exactly with intensity.
      tex.alpha = (tex.intensity == 0.0f).select(0.0f, tex.alpha);
      compute_trim(tex);
      db.textures_.push_back(std::move(tex));
    }
  }
  db.model_aspects_.resize(kModels);
  for (int j = 1; j <= kModels; ++j)
    db.model_aspects_[static_cast<std::size_t>(j - 1)] = db.texture(j, 1).aspect();
  return db;
}

StreakDatabase StreakDatabase::procedural() {
  StreakDatabase db;
  db.textures_.reserve(static_cast<std::size_t>(kModels * kOscillations));
  db.model_aspects_.resize(kModels);
  for (int j = 1; j <= kModels; ++j) {
    const double aspect = 1.5 * std::pow(40.0 / 1.5, static_cast<double>(j - 1) / (kModels - 1));
    for (int k = 1; k <= kOscillations; ++k)
      db.textures_.push_back(make_procedural_texture(j, k, aspect));
    db.model_aspects_[static_cast<std::size_t>(j - 1)] = db.texture(j, 1).aspect();
  }
  return db;
}

const StreakTexture& StreakDatabase::texture(int model_j, int oscillation_k) const {
  if (model_j < 1 || model_j > kModels || oscillation_k < 1 || oscillation_k > kOscillations)
    throw std::out_of_range("StreakDatabase::texture: index out of range");
  return textures_[static_cast<std::size_t>((model_j - 1) * kOscillations + (oscillation_k - 1))];
}

double StreakDatabase::model_aspect(int model_j) const {
  if (model_j < 1 || model_j > kModels)
    throw std::out_of_range("StreakDatabase::model_aspect: index out of range");
  return model_aspects_[static_cast<std::size_t>(model_j - 1)];
}

const StreakTexture& select_streak(const StreakDatabase& db, const StreakGeometry& geometry,
                                   std::mt19937_64& rng) {
  if (db.size() == 0) throw std::invalid_argument("select_streak: empty database");
  const double aspect =
      static_cast<double>(geometry.length_px()) / std::max(1.0e-6, static_cast<double>(geometry.image_diameter_px));
  int best_j = 1;
  double best_err = std::abs(db.model_aspect(1) - aspect);
  for (int j = 2; j <= StreakDatabase::kModels; ++j) {
    const double err = std::abs(db.model_aspect(j) - aspect);
    if (err < best_err) {  // strict: ties keep the lower index
      best_err = err;
      best_j = j;
    }
  }
  const int k =
      1 + std::min(StreakDatabase::kOscillations - 1,
                   static_cast<int>(uniform_unit(rng) * StreakDatabase::kOscillations));
  return db.texture(best_j, k);
}

Eigen::Matrix3d streak_homography(const StreakTexture& tex, const StreakGeometry& geometry) {
  const double tx0 = static_cast<double>(tex.trim_x0), tx1 = static_cast<double>(tex.trim_x1);
  const double ty0 = static_cast<double>(tex.trim_y0), ty1 = static_cast<double>(tex.trim_y1);
  const Eigen::Vector2d t_start((tx0 + tx1) / 2.0, ty0);
  const Eigen::Vector2d t_end((tx0 + tx1) / 2.0, ty1);
  const Eigen::Vector2d t_left(tx0, (ty0 + ty1) / 2.0);
  const Eigen::Vector2d t_right(tx1, (ty0 + ty1) / 2.0);

  const Eigen::Vector2d s = geometry.start_px.cast<double>();
  const Eigen::Vector2d e = geometry.end_px.cast<double>();
  const double len = (e - s).norm();
  const double diam = geometry.image_diameter_px;

  bool degenerate = len < 1.0e-6 || diam < 1.0e-6 || tx1 - tx0 < 1.0 || ty1 - ty0 < 1.0;
  if (!degenerate) {
    const Eigen::Vector2d dir = (e - s) / len;
    const Eigen::Vector2d normal(dir.y(), -dir.x());
    const Eigen::Vector2d mid = (s + e) / 2.0;
    Eigen::Matrix<double, 4, 2> src, dst;
    src << t_start.transpose(), t_end.transpose(), t_left.transpose(), t_right.transpose();
    dst << s.transpose(), e.transpose(), (mid - normal * diam / 2.0).transpose(),
        (mid + normal * diam / 2.0).transpose();
    try {
      return solve_homography(src, dst);
    } catch (const std::domain_error&) {
    }
  }
  return similarity_transform(t_start, t_end, s, e);
}

RenderedStreak warp_streak(const StreakTexture& tex, const StreakGeometry& geometry) {
  const double tx0 = static_cast<double>(tex.trim_x0), tx1 = static_cast<double>(tex.trim_x1);
  const double ty0 = static_cast<double>(tex.trim_y0), ty1 = static_cast<double>(tex.trim_y1);
  const Eigen::Vector2d s = geometry.start_px.cast<double>();
  const Eigen::Vector2d e = geometry.end_px.cast<double>();
  const Eigen::Matrix3d H = streak_homography(tex, geometry);

  // Sprite bounds: warped trim corners plus the streak endpoints, padded.
  auto map_pt = [&](double x, double y) {
    const Eigen::Vector3d q = H * Eigen::Vector3d(x, y, 1.0);
    return Eigen::Vector2d(q.x() / q.z(), q.y() / q.z());
  };
  Eigen::Vector2d lo = s.cwiseMin(e), hi = s.cwiseMax(e);
  for (const auto& corner : {Eigen::Vector2d(tx0, ty0), Eigen::Vector2d(tx1, ty0),
                             Eigen::Vector2d(tx0, ty1), Eigen::Vector2d(tx1, ty1)}) {
    const Eigen::Vector2d p = map_pt(corner.x(), corner.y());
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Eigen::Index x_lo = static_cast<Eigen::Index>(std::floor(lo.x())) - 2;
  const Eigen::Index y_lo = static_cast<Eigen::Index>(std::floor(lo.y())) - 2;
  const Eigen::Index x_hi = static_cast<Eigen::Index>(std::ceil(hi.x())) + 2;
  const Eigen::Index y_hi = static_cast<Eigen::Index>(std::ceil(hi.y())) + 2;

  RenderedStreak out;
  out.geometry = geometry;
  out.origin_px = Eigen::Vector2i(static_cast<int>(x_lo), static_cast<int>(y_lo));
  const Eigen::Index w = x_hi - x_lo + 1, h = y_hi - y_lo + 1;
  out.alpha = Planef::Zero(h, w);
  Planef gray = Planef::Zero(h, w);

  const Eigen::Matrix3d Hinv = H.inverse();
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      const Eigen::Vector3d q = Hinv * Eigen::Vector3d(static_cast<double>(x + x_lo),
                                                       static_cast<double>(y + y_lo), 1.0);
      if (std::abs(q.z()) < 1.0e-12) continue;
      const double u = q.x() / q.z(), v = q.y() / q.z();
      gray(y, x) = sample_zero_padded(tex.intensity, u, v);
      out.alpha(y, x) = sample_zero_padded(tex.alpha, u, v);
    }
  }
  for (int c = 0; c < 3; ++c) out.rgb[static_cast<std::size_t>(c)] = gray;
  return out;
}

RenderedStreak shade_streak(RenderedStreak streak, const Rgb& fov_mean_radiance,
                            const Rgb& env_mean_radiance) {
  const Rgb factor = 0.94f * fov_mean_radiance + 0.06f * env_mean_radiance;
  for (int c = 0; c < 3; ++c) streak.rgb[static_cast<std::size_t>(c)] *= factor[c];
  return streak;
}

RenderedStreak shade_streak(RenderedStreak streak, const DropFovRegion& fov_region,
                            const EnvironmentMap& env) {
  return shade_streak(std::move(streak), fov_region.mean_radiance, solid_angle_mean(env));
}

double circle_of_confusion_px(double depth_m, const CameraRig& rig) {
  if (!(depth_m > 0.0)) throw std::invalid_argument("circle_of_confusion: depth must be > 0");
  const double f = rig.focal_length_m;
  const double c_m = (depth_m - rig.focus_plane_m) * f * f /
                     (depth_m * (rig.focus_plane_m - f) * rig.f_number);
  return std::abs(c_m) * rig.pixels_per_meter;
}

RenderedStreak defocus_streak(const RenderedStreak& streak, double coc_px) {
  if (coc_px < 0.0) throw std::invalid_argument("defocus_streak: coc must be >= 0");
  if (coc_px < 1.0) return streak;

  const double radius = coc_px / 2.0;
  const int taps = static_cast<int>(std::ceil(radius + 0.5));
  const int n = 2 * taps + 1;
  Planef kernel = Planef::Zero(n, n);
  double total = 0.0;
  for (int ky = -taps; ky <= taps; ++ky) {
    for (int kx = -taps; kx <= taps; ++kx) {
      // 4x4 subsample coverage of the disk over this cell.
      int inside = 0;
      for (int sy = 0; sy < 4; ++sy)
        for (int sx = 0; sx < 4; ++sx) {
          const double px = kx - 0.5 + (sx + 0.5) / 4.0;
          const double py = ky - 0.5 + (sy + 0.5) / 4.0;
          if (px * px + py * py <= radius * radius) ++inside;
        }
      kernel(ky + taps, kx + taps) = static_cast<float>(inside) / 16.0f;
      total += inside / 16.0;
    }
  }
  kernel /= static_cast<float>(total);

  RenderedStreak out;
  out.geometry = streak.geometry;
  out.origin_px = streak.origin_px - Eigen::Vector2i(taps, taps);
  const Eigen::Index h = streak.height() + 2 * taps, w = streak.width() + 2 * taps;
  auto convolve = [&](const Planef& src) {
    Planef dst = Planef::Zero(h, w);
    for (Eigen::Index y = 0; y < src.rows(); ++y)
      for (Eigen::Index x = 0; x < src.cols(); ++x) {
        const float v = src(y, x);
        if (v == 0.0f) continue;
        dst.block(y, x, n, n) += v * kernel;
      }
    return dst;
  };
  for (int c = 0; c < 3; ++c) out.rgb[static_cast<std::size_t>(c)] = convolve(streak.rgb[static_cast<std::size_t>(c)]);
  out.alpha = convolve(streak.alpha);
  return out;
}

}  // namespace pluvia
