// SPDX-FileCopyrightText: 2026 The pluvia authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Independent brute-force references the tests check the library against.
// Everything here is deliberately written the slow, obvious way and stays
// free of the implementation code paths it validates.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "pluvia/types.hpp"

namespace pluvia::oracle {

/// Direct O(N r^2) normalized box mean.
inline Planef box_filter_direct(const Planef& src, int radius) {
  const Eigen::Index h = src.rows(), w = src.cols();
  Planef out(h, w);
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x) {
      double acc = 0.0;
      int n = 0;
      for (Eigen::Index yy = std::max<Eigen::Index>(0, y - radius);
           yy <= std::min<Eigen::Index>(h - 1, y + radius); ++yy)
        for (Eigen::Index xx = std::max<Eigen::Index>(0, x - radius);
             xx <= std::min<Eigen::Index>(w - 1, x + radius); ++xx) {
          acc += src(yy, xx);
          ++n;
        }
      out(y, x) = static_cast<float>(acc / n);
    }
  return out;
}

/// Direct guided filter evaluation (local linear model of p on I).
inline Planef guided_filter_direct(const Planef& p, const Planef& I, int radius, double eps) {
  const auto mean_I = box_filter_direct(I, radius);
  const auto mean_p = box_filter_direct(p, radius);
  const auto corr_I = box_filter_direct((I * I).eval(), radius);
  const auto corr_Ip = box_filter_direct((I * p).eval(), radius);
  Planef a(p.rows(), p.cols()), b(p.rows(), p.cols());
  for (Eigen::Index y = 0; y < p.rows(); ++y)
    for (Eigen::Index x = 0; x < p.cols(); ++x) {
      const double var = std::max(0.0, static_cast<double>(corr_I(y, x)) - mean_I(y, x) * mean_I(y, x));
      const double cov = static_cast<double>(corr_Ip(y, x)) - mean_I(y, x) * mean_p(y, x);
      a(y, x) = static_cast<float>(cov / (var + eps));
      b(y, x) = static_cast<float>(mean_p(y, x) - a(y, x) * mean_I(y, x));
    }
  const auto mean_a = box_filter_direct(a, radius);
  const auto mean_b = box_filter_direct(b, radius);
  return mean_a * I + mean_b;
}

/// Fine-grid spherical quadrature of a scalar function of (lon, lat),
/// optionally restricted by a predicate on the direction.
inline double sphere_quadrature_mean(
    const std::function<double(double lon, double lat)>& fn,
    const std::function<bool(const Eigen::Vector3d&)>& inside, int n_lat = 2000) {
  const int n_lon = 2 * n_lat;
  double acc = 0.0, weight = 0.0;
  for (int iy = 0; iy < n_lat; ++iy) {
    const double lat = M_PI / 2.0 - (iy + 0.5) / n_lat * M_PI;
    const double lat_hi = M_PI / 2.0 - static_cast<double>(iy) / n_lat * M_PI;
    const double lat_lo = M_PI / 2.0 - static_cast<double>(iy + 1) / n_lat * M_PI;
    const double w = 2.0 * M_PI / n_lon * (std::sin(lat_hi) - std::sin(lat_lo));
    for (int ix = 0; ix < n_lon; ++ix) {
      const double lon = (ix + 0.5) / n_lon * 2.0 * M_PI - M_PI;
      const double cl = std::cos(lat);
      const Eigen::Vector3d dir(cl * std::sin(lon), -std::sin(lat), cl * std::cos(lon));
      if (!inside(dir)) continue;
      acc += w * fn(lon, lat);
      weight += w;
    }
  }
  return weight > 0.0 ? acc / weight : 0.0;
}

/// Bilinear image sample with clamped coordinates; pixel (i, j) at (i, j).
inline float bilinear_sample(const Planef& p, double x, double y) {
  x = std::clamp(x, 0.0, static_cast<double>(p.cols() - 1));
  y = std::clamp(y, 0.0, static_cast<double>(p.rows() - 1));
  const Eigen::Index x0 = static_cast<Eigen::Index>(std::floor(x));
  const Eigen::Index y0 = static_cast<Eigen::Index>(std::floor(y));
  const Eigen::Index x1 = std::min(x0 + 1, p.cols() - 1);
  const Eigen::Index y1 = std::min(y0 + 1, p.rows() - 1);
  const double fx = x - x0, fy = y - y0;
  return static_cast<float>((p(y0, x0) * (1 - fx) + p(y0, x1) * fx) * (1 - fy) +
                            (p(y1, x0) * (1 - fx) + p(y1, x1) * fx) * fy);
}

/// Kolmogorov-Smirnov statistic of samples against a CDF.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    worst = std::max(worst, std::abs(static_cast<double>(i + 1) / n - f));
    worst = std::max(worst, std::abs(f - static_cast<double>(i) / n));
  }
  return worst;
}

}  // namespace pluvia::oracle
