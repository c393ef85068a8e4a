// SPDX-FileCopyrightText: 2026 The pluvia authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstdint>
#include <stdexcept>

namespace pluvia {

/// Row-major dense raster plane; (row, col) == (y, x).
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Planef = Plane<float>;
using Planed = Plane<double>;
using MaskPlane = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Rgb = Eigen::Array3f;
using Rgbd = Eigen::Array3d;

/// Planar RGB raster in linear radiance. Working range is normalized so that
/// 8-bit white decodes to 1.0; values above 1 are legal (unbounded radiance).
template <typename Scalar>
class ImageT {
 public:
  using PlaneType = Plane<Scalar>;

  ImageT() = default;
  ImageT(Eigen::Index width, Eigen::Index height)
      : planes_{PlaneType::Zero(height, width), PlaneType::Zero(height, width),
                PlaneType::Zero(height, width)} {}

  static ImageT constant(Eigen::Index width, Eigen::Index height, Scalar value) {
    ImageT img(width, height);
    for (auto& p : img.planes_) p.setConstant(value);
    return img;
  }

  Eigen::Index width() const { return planes_[0].cols(); }
  Eigen::Index height() const { return planes_[0].rows(); }
  bool empty() const { return planes_[0].size() == 0; }

  PlaneType& channel(int c) { return planes_[static_cast<std::size_t>(c)]; }
  const PlaneType& channel(int c) const { return planes_[static_cast<std::size_t>(c)]; }

  Eigen::Array<Scalar, 3, 1> pixel(Eigen::Index x, Eigen::Index y) const {
    return {planes_[0](y, x), planes_[1](y, x), planes_[2](y, x)};
  }
  void set_pixel(Eigen::Index x, Eigen::Index y, const Eigen::Array<Scalar, 3, 1>& v) {
    planes_[0](y, x) = v[0];
    planes_[1](y, x) = v[1];
    planes_[2](y, x) = v[2];
  }

  bool same_shape(const ImageT& other) const {
    return width() == other.width() && height() == other.height();
  }

  /// Joint mean radiance over all pixels and channels (double accumulation).
  double mean() const {
    if (empty()) return 0.0;
    double acc = 0.0;
    for (const auto& p : planes_) acc += p.template cast<double>().sum();
    return acc / (3.0 * static_cast<double>(planes_[0].size()));
  }

  bool all_finite() const {
    for (const auto& p : planes_)
      if (!p.isFinite().all()) return false;
    return true;
  }

  Scalar min_value() const {
    Scalar m = planes_[0].minCoeff();
    for (int c = 1; c < 3; ++c) m = std::min(m, planes_[c].minCoeff());
    return m;
  }

 private:
  std::array<PlaneType, 3> planes_;
};

using LinearImage = ImageT<float>;

/// Per-pixel metric scene distance in meters, aligned to its companion image.
/// Ingestion guarantees every value finite and > 0.
using DepthMap = Planef;

/// Rec.709 luma of linear RGB.
inline float luminance(const Rgb& rgb) {
  return 0.2126f * rgb[0] + 0.7152f * rgb[1] + 0.0722f * rgb[2];
}

template <typename Scalar>
Plane<Scalar> luminance(const ImageT<Scalar>& img) {
  return Scalar(0.2126) * img.channel(0) + Scalar(0.7152) * img.channel(1) +
         Scalar(0.0722) * img.channel(2);
}

/// Camera intrinsics/extrinsics and imaging parameters.
///
/// Conventions: camera frame is x right, y down, z forward (optical axis).
/// The world frame uses the same axes when `cam_to_world` is identity, so
/// gravity points along +y. Pixel (i, j) has continuous coordinates (i, j);
/// a principal point of (-1, -1) means "use the image center".
struct CameraRig {
  double focal_length_m = 6.0e-3;
  double f_number = 2.0;
  double exposure_s = 2.0e-3;
  double focus_plane_m = 6.0;
  Eigen::Vector2d principal_point_px{-1.0, -1.0};
  double pixels_per_meter = 120256.0;  // sensor scale
  double camera_height_m = 1.5;
  double ego_speed_mps = 0.0;
  Eigen::Matrix3d cam_to_world = Eigen::Matrix3d::Identity();

  double focal_px() const { return focal_length_m * pixels_per_meter; }

  /// Resolve the principal-point sentinel against actual image dimensions.
  Eigen::Vector2d principal_point(Eigen::Index width, Eigen::Index height) const {
    if (principal_point_px.x() < 0.0 || principal_point_px.y() < 0.0)
      return {(static_cast<double>(width) - 1.0) / 2.0,
              (static_cast<double>(height) - 1.0) / 2.0};
    return principal_point_px;
  }

  void validate() const {
    if (!(focal_length_m > 0.0)) throw std::invalid_argument("CameraRig: focal_length must be > 0");
    if (!(f_number > 0.0)) throw std::invalid_argument("CameraRig: f_number must be > 0");
    if (!(exposure_s > 0.0)) throw std::invalid_argument("CameraRig: exposure_time must be > 0");
    if (!(focus_plane_m > focal_length_m))
      throw std::invalid_argument("CameraRig: focus_plane must exceed focal_length");
    if (!(pixels_per_meter > 0.0))
      throw std::invalid_argument("CameraRig: pixels_per_meter must be > 0");
  }
};

/// Pinhole projection of a camera-frame point (requires z > 0).
inline Eigen::Vector2d project_point(const CameraRig& rig, const Eigen::Vector2d& principal,
                                     const Eigen::Vector3d& p_cam) {
  const double f = rig.focal_px();
  return {principal.x() + f * p_cam.x() / p_cam.z(),
          principal.y() + f * p_cam.y() / p_cam.z()};
}

/// Un-normalized view ray through a pixel (z component is 1).
inline Eigen::Vector3d view_ray(const CameraRig& rig, const Eigen::Vector2d& principal,
                                double px, double py) {
  const double f = rig.focal_px();
  return {(px - principal.x()) / f, (py - principal.y()) / f, 1.0};
}

}  // namespace pluvia
