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

#include <cmath>

#include "leafforge/image.hpp"

namespace leafforge::detail {

/// std::floor without the library call for coordinates in int range.
inline double floor_coord(double v) noexcept {
  if (!(v > -1e9 && v < 1e9)) return std::floor(v);
  const int i = static_cast<int>(v);
  return static_cast<double>(v < i ? i - 1 : i);
}

inline double fetch(const Image& img, int x, int y, int c, BorderMode border) noexcept {
  const int rx = resolve_border(x, img.width(), border.kind);
  const int ry = resolve_border(y, img.height(), border.kind);
  if (rx < 0 || ry < 0) return border.value;
  return img.at(rx, ry, c);
}

/// Nearest sample; the coordinate is rounded half away from zero.
inline double sample_nearest(const Image& img, double x, double y, int c,
                             BorderMode border) noexcept {
  return fetch(img, static_cast<int>(std::round(x)), static_cast<int>(std::round(y)), c,
               border);
}

/// At integer coordinates the result is exactly the stored sample.
inline double sample_bilinear(const Image& img, double x, double y, int c,
                              BorderMode border) noexcept {
  const double fx = floor_coord(x);
  const double fy = floor_coord(y);
  const int x0 = static_cast<int>(fx);
  const int y0 = static_cast<int>(fy);
  const double ax = x - fx;
  const double ay = y - fy;
  const double v00 = fetch(img, x0, y0, c, border);
  if (ax == 0.0 && ay == 0.0) return v00;
  const double v10 = fetch(img, x0 + 1, y0, c, border);
  const double v01 = fetch(img, x0, y0 + 1, c, border);
  const double v11 = fetch(img, x0 + 1, y0 + 1, c, border);
  const double top = v00 + (v10 - v00) * ax;
  const double bottom = v01 + (v11 - v01) * ax;
  return top + (bottom - top) * ay;
}

/// All channels of one output pixel. Same arithmetic as sample_bilinear,
/// with direct reads when the 2x2 footprint lies inside the image.
inline void sample_bilinear_pixel(const Image& img, double x, double y, BorderMode border,
                                  std::uint8_t* out) noexcept {
  const int C = img.channels();
  const double fx = floor_coord(x);
  const double fy = floor_coord(y);
  const double ax = x - fx;
  const double ay = y - fy;
  if (fx >= 0.0 && fy >= 0.0 && fx + 1.0 < img.width() && fy + 1.0 < img.height()) {
    const int x0 = static_cast<int>(fx);
    const int y0 = static_cast<int>(fy);
    const std::uint8_t* p00 = img.data().data() + img.index(x0, y0);
    const std::uint8_t* p01 = p00 + static_cast<std::size_t>(img.width()) * C;
    if (ax == 0.0 && ay == 0.0) {
      for (int c = 0; c < C; ++c) out[c] = p00[c];
      return;
    }
    for (int c = 0; c < C; ++c) {
      const double v00 = p00[c], v10 = p00[C + c];
      const double v01 = p01[c], v11 = p01[C + c];
      const double top = v00 + (v10 - v00) * ax;
      const double bottom = v01 + (v11 - v01) * ax;
      out[c] = saturate_u8(top + (bottom - top) * ay);
    }
    return;
  }
  if (!(fx > -1e9 && fx < 1e9 && fy > -1e9 && fy < 1e9)) {
    for (int c = 0; c < C; ++c) out[c] = saturate_u8(sample_bilinear(img, x, y, c, border));
    return;
  }
  // Footprint crosses the border: resolve the four corners once for all
  // channels. A negative index means the constant border value.
  const int x0 = static_cast<int>(fx);
  const int y0 = static_cast<int>(fy);
  const int rx0 = resolve_border(x0, img.width(), border.kind);
  const int ry0 = resolve_border(y0, img.height(), border.kind);
  const std::uint8_t* base = img.data().data();
  const auto at = [&](int rx, int ry, int c) -> double {
    return rx < 0 || ry < 0 ? border.value : base[img.index(rx, ry, c)];
  };
  if (ax == 0.0 && ay == 0.0) {
    for (int c = 0; c < C; ++c) out[c] = saturate_u8(at(rx0, ry0, c));
    return;
  }
  const int rx1 = resolve_border(x0 + 1, img.width(), border.kind);
  const int ry1 = resolve_border(y0 + 1, img.height(), border.kind);
  for (int c = 0; c < C; ++c) {
    const double v00 = at(rx0, ry0, c), v10 = at(rx1, ry0, c);
    const double v01 = at(rx0, ry1, c), v11 = at(rx1, ry1, c);
    const double top = v00 + (v10 - v00) * ax;
    const double bottom = v01 + (v11 - v01) * ax;
    out[c] = saturate_u8(top + (bottom - top) * ay);
  }
}

}  // namespace leafforge::detail
