// SPDX-FileCopyrightText: 2026 The pluvia authors
// SPDX-License-Identifier: Apache-2.0

#include "pluvia/depth.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>
#include <vector>

namespace pluvia {
namespace {

// Summed-area table in double so 1242x375 accumulations stay exact enough
// for the guided-filter algebra.
Planed summed_area(const Planef& src) {
  const Eigen::Index h = src.rows(), w = src.cols();
  Planed sat = Planed::Zero(h + 1, w + 1);
  for (Eigen::Index y = 0; y < h; ++y) {
    double row_acc = 0.0;
    for (Eigen::Index x = 0; x < w; ++x) {
      row_acc += static_cast<double>(src(y, x));
      sat(y + 1, x + 1) = sat(y, x + 1) + row_acc;
    }
  }
  return sat;
}

}  // namespace

Planef box_filter(const Planef& src, int radius) {
  if (radius < 0) throw std::invalid_argument("box_filter: radius must be >= 0");
  if (radius == 0) return src;
  const Eigen::Index h = src.rows(), w = src.cols();
  const Planed sat = summed_area(src);
  Planef out(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    const Eigen::Index y0 = std::max<Eigen::Index>(0, y - radius);
    const Eigen::Index y1 = std::min<Eigen::Index>(h - 1, y + radius);
    for (Eigen::Index x = 0; x < w; ++x) {
      const Eigen::Index x0 = std::max<Eigen::Index>(0, x - radius);
      const Eigen::Index x1 = std::min<Eigen::Index>(w - 1, x + radius);
      const double sum = sat(y1 + 1, x1 + 1) - sat(y0, x1 + 1) - sat(y1 + 1, x0) + sat(y0, x0);
      out(y, x) = static_cast<float>(sum / static_cast<double>((y1 - y0 + 1) * (x1 - x0 + 1)));
    }
  }
  return out;
}

DepthMap fill_depth_holes(const Planef& raw) {
  const Eigen::Index h = raw.rows(), w = raw.cols();
  if (h == 0 || w == 0) throw std::invalid_argument("depth map is empty");

  auto valid = [&](Eigen::Index y, Eigen::Index x) {
    const float v = raw(y, x);
    return std::isfinite(v) && v > 0.0f;
  };

  DepthMap out(h, w);
  std::vector<char> seen(static_cast<std::size_t>(h * w), 0);
  std::deque<Eigen::Index> queue;
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      if (valid(y, x)) {
        out(y, x) = raw(y, x);
        seen[static_cast<std::size_t>(y * w + x)] = 1;
        queue.push_back(y * w + x);
      }
    }
  }
  if (queue.empty()) throw std::runtime_error("depth map contains no valid (finite, > 0) value");

  // Layered BFS: each hole takes the value of its nearest valid pixel, ties
  // resolved by scan order for determinism.
  const Eigen::Index dx[4] = {0, 0, -1, 1};
  const Eigen::Index dy[4] = {-1, 1, 0, 0};
  while (!queue.empty()) {
    const Eigen::Index idx = queue.front();
    queue.pop_front();
    const Eigen::Index y = idx / w, x = idx % w;
    for (int k = 0; k < 4; ++k) {
      const Eigen::Index ny = y + dy[k], nx = x + dx[k];
      if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
      const Eigen::Index nidx = ny * w + nx;
      if (seen[static_cast<std::size_t>(nidx)]) continue;
      seen[static_cast<std::size_t>(nidx)] = 1;
      out(ny, nx) = out(y, x);
      queue.push_back(nidx);
    }
  }
  return out;
}

DepthMap refine_depth_edges(const DepthMap& depth, const LinearImage& guide, int radius,
                            float eps) {
  if (depth.rows() != guide.height() || depth.cols() != guide.width())
    throw std::invalid_argument("refine_depth_edges: depth and guide dimensions differ");
  if (radius < 1) throw std::invalid_argument("refine_depth_edges: radius must be >= 1");
  if (radius >= std::min(depth.rows(), depth.cols()) / 2)
    throw std::invalid_argument("refine_depth_edges: radius too large for image");
  if (eps < 0.0f) throw std::invalid_argument("refine_depth_edges: eps must be >= 0");

  const Planef I = luminance(guide);
  const Planef& p = depth;

  const Planef mean_I = box_filter(I, radius);
  const Planef mean_p = box_filter(p, radius);
  const Planef corr_I = box_filter((I * I).eval(), radius);
  const Planef corr_Ip = box_filter((I * p).eval(), radius);

  const Planef var_I = (corr_I - mean_I * mean_I).cwiseMax(0.0f);
  const Planef cov_Ip = corr_Ip - mean_I * mean_p;

  const Planef a = cov_Ip / (var_I + eps);
  const Planef b = mean_p - a * mean_I;

  const Planef q = box_filter(a, radius) * I + box_filter(b, radius);
  return q.cwiseMax(kMinDepthM);
}

}  // namespace pluvia
