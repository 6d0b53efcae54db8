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

#pragma once

#include <array>

#include "leafforge/image.hpp"
#include "leafforge/random.hpp"

namespace leafforge {

Image flip_horizontal(const Image& img);
Image flip_vertical(const Image& img);

/// Strengths of one affine draw. Translation is a fraction of the axis
/// length; angles are in degrees.
struct AffineParams {
  double scale_x = 1.0;
  double scale_y = 1.0;
  double translate_x = 0.0;
  double translate_y = 0.0;
  double rotate = 0.0;
  double shear = 0.0;

  friend bool operator==(const AffineParams&, const AffineParams&) = default;
};

/// Throws InvalidParam unless scales are positive, |shear| < 90 and the
/// translations lie in [-1, 1].
void validate(const AffineParams& p);

/// Row-major 2x3 matrix [a b tx; c d ty] mapping source to destination.
struct Affine2D {
  std::array<double, 6> m{1, 0, 0, 0, 1, 0};

  static Affine2D translation(double tx, double ty) { return {{1, 0, tx, 0, 1, ty}}; }

  /// this * rhs (apply rhs first).
  Affine2D operator*(const Affine2D& rhs) const;

  double det() const noexcept { return m[0] * m[4] - m[1] * m[3]; }

  /// Cofactor inverse; throws SingularTransform when det is ~0.
  Affine2D inverse() const;
};

/**
 * Forward matrix of the augmentation affine for a width x height image:
 *
 *   M = T(t) * T(c) * R(rotate) * Sh(shear) * S(sx, sy) * T(-c)
 *
 * with c = ((width-1)/2, (height-1)/2) and t = (tx * width, ty * height).
 * R is [cos -sin; sin cos] in image coordinates (y down), Sh is the x-shear
 * [1 tan(shear); 0 1].
 */
Affine2D affine_matrix(const AffineParams& p, int width, int height);

/// Inverse-maps every output pixel through affine_matrix. Output keeps the
/// input geometry.
Image affine(const Image& img, const AffineParams& p, Interp interp = Interp::Bilinear,
             BorderMode border = BorderMode::reflect());

/// Control lattice for local distortion.
struct DistortGrid {
  int rows = 4;
  int cols = 4;
  double jitter_sigma = 0.03;  // fraction of min(width, height)

  friend bool operator==(const DistortGrid&, const DistortGrid&) = default;
};

void validate(const DistortGrid& grid);

/// Piecewise-bilinear displacement field driven by Gaussian jitter of the
/// lattice points. Draws 2 * rows * cols normals from `rng` (dx then dy,
/// row-major) regardless of image content.
Image elastic_distort(const Image& img, const DistortGrid& grid, RngStream& rng);

}  // namespace leafforge
