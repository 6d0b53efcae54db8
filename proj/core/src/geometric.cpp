// Copyright 2026 The LeafForge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "leafforge/geometric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "leafforge/error.hpp"
#include "sampling.hpp"

namespace leafforge {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

Image flip_horizontal(const Image& img) {
  Image out = Image::like(img);
  const int W = img.width();
  const int C = img.channels();
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < W; ++x) {
      for (int c = 0; c < C; ++c) out.at(x, y, c) = img.at(W - 1 - x, y, c);
    }
  }
  return out;
}

Image flip_vertical(const Image& img) {
  Image out = Image::like(img);
  const int H = img.height();
  for (int y = 0; y < H; ++y) {
    const auto src = img.row(H - 1 - y);
    std::copy(src.begin(), src.end(), out.data().begin() + out.index(0, y));
  }
  return out;
}

void validate(const AffineParams& p) {
  if (!(p.scale_x > 0.0) || !(p.scale_y > 0.0)) {
    throw Error(ErrorCode::InvalidParam, "affine scale factors must be positive");
  }
  if (!(std::abs(p.shear) < 90.0)) {
    throw Error(ErrorCode::InvalidParam, "affine shear must satisfy |shear| < 90 degrees");
  }
  if (!(std::abs(p.translate_x) <= 1.0) || !(std::abs(p.translate_y) <= 1.0)) {
    throw Error(ErrorCode::InvalidParam, "affine translation must lie in [-1, 1]");
  }
  if (!std::isfinite(p.rotate)) {
    throw Error(ErrorCode::InvalidParam, "affine rotation must be finite");
  }
}

Affine2D Affine2D::operator*(const Affine2D& rhs) const {
  const auto& a = m;
  const auto& b = rhs.m;
  return {{a[0] * b[0] + a[1] * b[3], a[0] * b[1] + a[1] * b[4],
           a[0] * b[2] + a[1] * b[5] + a[2],
           a[3] * b[0] + a[4] * b[3], a[3] * b[1] + a[4] * b[4],
           a[3] * b[2] + a[4] * b[5] + a[5]}};
}

Affine2D Affine2D::inverse() const {
  const double d = det();
  if (!(std::abs(d) > 1e-12)) {
    throw Error(ErrorCode::SingularTransform, "affine matrix is not invertible");
  }
  const double a = m[0], b = m[1], tx = m[2];
  const double c = m[3], e = m[4], ty = m[5];
  return {{e / d, -b / d, (b * ty - e * tx) / d,
           -c / d, a / d, (c * tx - a * ty) / d}};
}

Affine2D affine_matrix(const AffineParams& p, int width, int height) {
  const double cx = (width - 1) / 2.0;
  const double cy = (height - 1) / 2.0;
  const double theta = p.rotate * kDegToRad;
  const double cs = std::cos(theta);
  const double sn = std::sin(theta);
  const double sh = std::tan(p.shear * kDegToRad);

  const Affine2D scale{{p.scale_x, 0, 0, 0, p.scale_y, 0}};
  const Affine2D shear{{1, sh, 0, 0, 1, 0}};
  const Affine2D rotate{{cs, -sn, 0, sn, cs, 0}};
  const Affine2D shift = Affine2D::translation(p.translate_x * width, p.translate_y * height);

  return shift * (Affine2D::translation(cx, cy) *
                  (rotate * (shear * (scale * Affine2D::translation(-cx, -cy)))));
}

Image affine(const Image& img, const AffineParams& p, Interp interp, BorderMode border) {
  validate(p);
  const Affine2D inv = affine_matrix(p, img.width(), img.height()).inverse();
  const auto& m = inv.m;
  Image out = Image::like(img);
  const int C = img.channels();
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double sx = m[0] * x + m[1] * y + m[2];
      const double sy = m[3] * x + m[4] * y + m[5];
      if (interp == Interp::Bilinear) {
        detail::sample_bilinear_pixel(img, sx, sy, border, &out.at(x, y));
        continue;
      }
      for (int c = 0; c < C; ++c) {
        out.at(x, y, c) = saturate_u8(detail::sample_nearest(img, sx, sy, c, border));
      }
    }
  }
  return out;
}

void validate(const DistortGrid& grid) {
  if (grid.rows < 2 || grid.cols < 2) {
    throw Error(ErrorCode::InvalidParam, "distortion grid needs at least 2x2 control points");
  }
  if (!(grid.jitter_sigma >= 0.0) || !std::isfinite(grid.jitter_sigma)) {
    throw Error(ErrorCode::InvalidParam, "distortion jitter must be finite and non-negative");
  }
}

Image elastic_distort(const Image& img, const DistortGrid& grid, RngStream& rng) {
  validate(grid);
  const int W = img.width();
  const int H = img.height();
  const double sigma = grid.jitter_sigma * std::min(W, H);

  const std::size_t points = static_cast<std::size_t>(grid.rows) * grid.cols;
  std::vector<double> dx(points), dy(points);
  for (std::size_t i = 0; i < points; ++i) {
    dx[i] = sigma * rng.normal();
    dy[i] = sigma * rng.normal();
  }
  if (sigma == 0.0) return img;

  // Lattice coordinate of each pixel column/row, precomputed once.
  struct Cell {
    int lo;
    double frac;
  };
  auto lattice = [](int n, int cells) {
    std::vector<Cell> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double g = n > 1 ? static_cast<double>(i) * (cells - 1) / (n - 1) : 0.0;
      int lo = static_cast<int>(std::floor(g));
      if (lo >= cells - 1) lo = cells - 2;
      out[static_cast<std::size_t>(i)] = {lo, g - lo};
    }
    return out;
  };
  const auto gx = lattice(W, grid.cols);
  const auto gy = lattice(H, grid.rows);

  auto field = [&](const std::vector<double>& d, const Cell& cx, const Cell& cy) {
    const std::size_t r0 = static_cast<std::size_t>(cy.lo) * grid.cols;
    const std::size_t r1 = r0 + grid.cols;
    const double top = d[r0 + cx.lo] + (d[r0 + cx.lo + 1] - d[r0 + cx.lo]) * cx.frac;
    const double bottom = d[r1 + cx.lo] + (d[r1 + cx.lo + 1] - d[r1 + cx.lo]) * cx.frac;
    return top + (bottom - top) * cy.frac;
  };

  Image out = Image::like(img);
  const auto border = BorderMode::reflect();
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const double sx = x + field(dx, gx[x], gy[y]);
      const double sy = y + field(dy, gx[x], gy[y]);
      detail::sample_bilinear_pixel(img, sx, sy, border, &out.at(x, y));
    }
  }
  return out;
}

}  // namespace leafforge
