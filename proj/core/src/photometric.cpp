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

#include "leafforge/photometric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "leafforge/error.hpp"

namespace leafforge {

namespace {

constexpr double kMaxBlurSigma = 50.0;
constexpr int kMaxBlurKernel = 99;

// Reflect-resolved source index for every offset in [-radius, n + radius).
std::vector<int> reflect_table(int n, int radius) {
  std::vector<int> table(static_cast<std::size_t>(n + 2 * radius));
  for (int i = -radius; i < n + radius; ++i) {
    table[static_cast<std::size_t>(i + radius)] =
        resolve_border(i, n, BorderMode::Kind::Reflect);
  }
  return table;
}

void check_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw Error(ErrorCode::InvalidParam, std::string(what) + " must lie in [0,1]");
  }
}

Image gaussian_blur(const Image& img, double sigma) {
  const auto kernel = gaussian_kernel_fixed(sigma);
  const int r = static_cast<int>(kernel.size() / 2);
  const int W = img.width();
  const int H = img.height();
  const int C = img.channels();
  const auto xs = reflect_table(W, r);
  const auto ys = reflect_table(H, r);

  // Horizontal pass keeps full precision (scale 2^20); the vertical pass
  // lands on 2^40 and is rounded once. Integer sums, so accumulation order
  // does not matter.
  const std::size_t stride = static_cast<std::size_t>(W) * C;
  std::vector<std::int64_t> tmp(img.size());
  std::vector<std::uint8_t> padded(static_cast<std::size_t>(W + 2 * r) * C);
  for (int y = 0; y < H; ++y) {
    const auto src = img.row(y);
    for (int x = -r; x < W + r; ++x) {
      const std::size_t from = static_cast<std::size_t>(xs[static_cast<std::size_t>(x + r)]) * C;
      for (int c = 0; c < C; ++c) {
        padded[static_cast<std::size_t>(x + r) * C + c] = src[from + c];
      }
    }
    std::int64_t* acc = tmp.data() + static_cast<std::size_t>(y) * stride;
    for (int i = 0; i <= 2 * r; ++i) {
      const std::int64_t k = kernel[static_cast<std::size_t>(i)];
      const std::uint8_t* in = padded.data() + static_cast<std::size_t>(i) * C;
      for (std::size_t q = 0; q < stride; ++q) acc[q] += k * in[q];
    }
  }
  Image out = Image::like(img);
  constexpr int shift = 2 * kGaussianFracBits;
  constexpr std::int64_t half = std::int64_t{1} << (shift - 1);
  std::vector<std::int64_t> acc(stride);
  for (int y = 0; y < H; ++y) {
    std::fill(acc.begin(), acc.end(), half);
    for (int j = 0; j <= 2 * r; ++j) {
      const std::int64_t k = kernel[static_cast<std::size_t>(j)];
      const std::int64_t* in =
          tmp.data() + static_cast<std::size_t>(ys[static_cast<std::size_t>(y + j)]) * stride;
      for (std::size_t q = 0; q < stride; ++q) acc[q] += k * in[q];
    }
    std::uint8_t* dst = out.data().data() + out.index(0, y);
    for (std::size_t q = 0; q < stride; ++q) {
      dst[q] = saturate_u8(static_cast<long long>(acc[q] >> shift));
    }
  }
  return out;
}

Image box_blur(const Image& img, int k) {
  const int r = k / 2;
  const int W = img.width();
  const int H = img.height();
  const int C = img.channels();
  const auto xs = reflect_table(W, r);
  const auto ys = reflect_table(H, r);
  const long long area = static_cast<long long>(k) * k;

  // Column sums over the vertical window, then a horizontal window over
  // those. Integer arithmetic, so the result equals the direct k*k sum.
  std::vector<long long> cols(static_cast<std::size_t>(W) * C);
  Image out = Image::like(img);
  for (int y = 0; y < H; ++y) {
    std::fill(cols.begin(), cols.end(), 0LL);
    for (int j = -r; j <= r; ++j) {
      const auto src = img.row(ys[static_cast<std::size_t>(y + j + r)]);
      for (std::size_t i = 0; i < cols.size(); ++i) cols[i] += src[i];
    }
    for (int x = 0; x < W; ++x) {
      for (int c = 0; c < C; ++c) {
        long long sum = 0;
        for (int i = -r; i <= r; ++i) {
          sum += cols[static_cast<std::size_t>(xs[static_cast<std::size_t>(x + i + r)]) * C + c];
        }
        out.at(x, y, c) = saturate_u8((2 * sum + area) / (2 * area));
      }
    }
  }
  return out;
}

// Sliding 256-bin histogram per row (Huang). The running median only moves
// by the values entering and leaving the window.
Image median_blur(const Image& img, int k) {
  const int r = k / 2;
  const int W = img.width();
  const int H = img.height();
  const int C = img.channels();
  const auto xs = reflect_table(W, r);
  const auto ys = reflect_table(H, r);
  const int rank = k * k / 2;
  Image out = Image::like(img);
  std::array<int, 256> hist{};
  for (int c = 0; c < C; ++c) {
    for (int y = 0; y < H; ++y) {
      hist.fill(0);
      int m = 0;
      int below = 0;  // number of window samples < m
      const auto add_column = [&](int sx, int delta) {
        for (int j = -r; j <= r; ++j) {
          const int v = img.at(sx, ys[static_cast<std::size_t>(y + j + r)], c);
          hist[static_cast<std::size_t>(v)] += delta;
          if (v < m) below += delta;
        }
      };
      for (int i = -r; i <= r; ++i) add_column(xs[static_cast<std::size_t>(i + r)], 1);
      for (int x = 0; x < W; ++x) {
        if (x > 0) {
          add_column(xs[static_cast<std::size_t>(x - 1)], -1);
          add_column(xs[static_cast<std::size_t>(x + 2 * r)], 1);
        }
        while (below > rank) {
          --m;
          below -= hist[static_cast<std::size_t>(m)];
        }
        while (below + hist[static_cast<std::size_t>(m)] <= rank) {
          below += hist[static_cast<std::size_t>(m)];
          ++m;
        }
        out.at(x, y, c) = static_cast<std::uint8_t>(m);
      }
    }
  }
  return out;
}

}  // namespace

void validate(const BlurSpec& spec) {
  switch (spec.method) {
    case BlurMethod::Gaussian:
      if (!(spec.sigma > 0.0 && spec.sigma <= kMaxBlurSigma)) {
        throw Error(ErrorCode::InvalidParam, "gaussian sigma must lie in (0, 50]");
      }
      break;
    case BlurMethod::Average:
    case BlurMethod::Median:
      if (spec.kernel < 3 || spec.kernel % 2 == 0 || spec.kernel > kMaxBlurKernel) {
        throw Error(ErrorCode::InvalidParam,
                    "blur window must be odd and in [3, 99], got " + std::to_string(spec.kernel));
      }
      break;
  }
}

void validate(const NoiseSpec& spec) {
  if (!(spec.sigma >= 0.0 && spec.sigma <= 255.0)) {
    throw Error(ErrorCode::InvalidParam, "noise sigma must lie in [0, 255]");
  }
}

void validate(const DropoutSpec& spec) {
  check_unit(spec.fraction, "dropout fraction");
  if (!(spec.patch_frac > 0.0 && spec.patch_frac <= 1.0)) {
    throw Error(ErrorCode::InvalidParam, "dropout patch_frac must lie in (0, 1]");
  }
}

std::vector<double> gaussian_kernel(double sigma) {
  validate(BlurSpec::gaussian(sigma));
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * r + 1));
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    const double w = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
    k[static_cast<std::size_t>(i + r)] = w;
    sum += w;
  }
  for (auto& w : k) w /= sum;
  return k;
}

std::vector<std::int64_t> gaussian_kernel_fixed(double sigma) {
  const auto k = gaussian_kernel(sigma);
  const int r = static_cast<int>(k.size() / 2);
  constexpr std::int64_t one = std::int64_t{1} << kGaussianFracBits;
  std::vector<std::int64_t> q(k.size());
  std::int64_t tails = 0;
  for (int i = 1; i <= r; ++i) {
    const auto v = static_cast<std::int64_t>(std::llround(k[static_cast<std::size_t>(r + i)] *
                                                          static_cast<double>(one)));
    q[static_cast<std::size_t>(r + i)] = v;
    q[static_cast<std::size_t>(r - i)] = v;
    tails += 2 * v;
  }
  // Center absorbs the rounding residue so the taps sum to exactly 2^20.
  q[static_cast<std::size_t>(r)] = one - tails;
  return q;
}

Image blur(const Image& img, const BlurSpec& spec) {
  validate(spec);
  switch (spec.method) {
    case BlurMethod::Gaussian: return gaussian_blur(img, spec.sigma);
    case BlurMethod::Average: return box_blur(img, spec.kernel);
    case BlurMethod::Median: return median_blur(img, spec.kernel);
  }
  return img;
}

Image convolve3x3(const Image& img, const std::array<double, 9>& kernel, double divisor) {
  const int W = img.width();
  const int H = img.height();
  const int C = img.channels();
  const auto xs = reflect_table(W, 1);
  const auto ys = reflect_table(H, 1);
  Image out = Image::like(img);
  const std::size_t stride = static_cast<std::size_t>(W) * C;
  const std::size_t padded = static_cast<std::size_t>(W + 2) * C;

  // Reflect-padded copies of the three source rows, as doubles.
  std::vector<double> rows(3 * padded);
  for (int y = 0; y < H; ++y) {
    for (int j = 0; j < 3; ++j) {
      const auto src = img.row(ys[static_cast<std::size_t>(y + j)]);
      double* dst = rows.data() + static_cast<std::size_t>(j) * padded;
      for (int x = 0; x < W + 2; ++x) {
        const std::size_t from = static_cast<std::size_t>(xs[static_cast<std::size_t>(x)]) * C;
        for (int c = 0; c < C; ++c) dst[static_cast<std::size_t>(x) * C + c] = src[from + c];
      }
    }
    std::uint8_t* dst = out.data().data() + out.index(0, y);
    for (std::size_t q = 0; q < stride; ++q) {
      double acc = 0.0;
      for (int j = 0; j < 3; ++j) {
        const double* r = rows.data() + static_cast<std::size_t>(j) * padded + q;
        for (int i = 0; i < 3; ++i) {
          acc += kernel[static_cast<std::size_t>(3 * j + i)] * r[static_cast<std::size_t>(i) * C];
        }
      }
      dst[q] = saturate_u8(acc / divisor);
    }
  }
  return out;
}

Image sharpen(const Image& img, double alpha, double lightness) {
  check_unit(alpha, "sharpen alpha");
  if (!(lightness >= 0.5 && lightness <= 2.0)) {
    throw Error(ErrorCode::InvalidParam, "sharpen lightness must lie in [0.5, 2]");
  }
  if (alpha == 0.0) return img;
  const std::array<double, 9> kernel{-1, -1, -1, -1, 8 + lightness, -1, -1, -1, -1};
  return blend(img, convolve3x3(img, kernel, lightness), alpha);
}

Image emboss(const Image& img, double alpha, double strength) {
  check_unit(alpha, "emboss alpha");
  if (!(strength >= 0.0 && strength <= 2.0)) {
    throw Error(ErrorCode::InvalidParam, "emboss strength must lie in [0, 2]");
  }
  if (alpha == 0.0) return img;
  const double s = strength;
  const std::array<double, 9> kernel{-1 - s, -s, 0, -s, 1, s, 0, s, 1 + s};
  return blend(img, convolve3x3(img, kernel), alpha);
}

Image add_gaussian_noise(const Image& img, const NoiseSpec& spec, RngStream& rng) {
  validate(spec);
  if (spec.sigma == 0.0) return img;
  const int C = img.channels();
  const std::size_t n = img.pixel_count() * (spec.per_channel ? C : 1);
  // Normals are drawn in polar-method pairs: (z0, z1), (z2, z3), ...
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; i += 2) {
    const auto [a, b] = rng.normal_pair();
    z[i] = a;
    if (i + 1 < n) z[i + 1] = b;
  }
  Image out = Image::like(img);
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t k = 0; k < src.size(); ++k) {
    const double delta = spec.sigma * z[spec.per_channel ? k : k / C];
    dst[k] = saturate_u8(src[k] + delta);
  }
  return out;
}

Image coarse_dropout(const Image& img, const DropoutSpec& spec, RngStream& rng) {
  validate(spec);
  const int W = img.width();
  const int H = img.height();
  const double target = spec.fraction * static_cast<double>(img.pixel_count());
  if (target <= 0.0) return img;

  const int side = std::max(1, static_cast<int>(std::lround(spec.patch_frac * std::min(W, H))));
  const double patch_area = static_cast<double>(side) * side;
  const long long budget =
      10 * std::max<long long>(1, static_cast<long long>(std::ceil(target / patch_area)));

  std::vector<std::uint8_t> mask(img.pixel_count(), 0);
  std::size_t covered = 0;
  for (long long attempt = 0; attempt < budget && static_cast<double>(covered) < target;
       ++attempt) {
    const int x0 = static_cast<int>(rng.uniform_int(0, W - side));
    const int y0 = static_cast<int>(rng.uniform_int(0, H - side));
    for (int y = y0; y < y0 + side; ++y) {
      for (int x = x0; x < x0 + side; ++x) {
        auto& m = mask[static_cast<std::size_t>(y) * W + x];
        covered += m == 0;
        m = 1;
      }
    }
  }

  Image out = img;
  const int C = img.channels();
  auto dst = out.data();
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) std::fill_n(dst.begin() + static_cast<std::ptrdiff_t>(i * C), C, 0);
  }
  return out;
}

Image brightness_contrast(const Image& img, double add, double mul) {
  if (!(add >= -255.0 && add <= 255.0)) {
    throw Error(ErrorCode::InvalidParam, "brightness offset must lie in [-255, 255]");
  }
  if (!(mul > 0.0 && mul <= 4.0)) {
    throw Error(ErrorCode::InvalidParam, "contrast factor must lie in (0, 4]");
  }
  if (add == 0.0 && mul == 1.0) return img;
  // Every input byte maps the same way, so build the table once.
  std::array<std::uint8_t, 256> lut{};
  for (int v = 0; v < 256; ++v) {
    lut[static_cast<std::size_t>(v)] = saturate_u8(mul * (v - 128) + 128 + add);
  }
  Image out = Image::like(img);
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = lut[src[i]];
  return out;
}

Image channel_shift(const Image& img, const std::array<int, 3>& offsets) {
  if (img.channels() != 3) {
    throw Error(ErrorCode::ChannelMismatch, "channel shift needs an RGB image, got " +
                                                std::to_string(img.channels()) + " channel(s)");
  }
  for (const int o : offsets) {
    if (o < -255 || o > 255) {
      throw Error(ErrorCode::InvalidParam, "channel offsets must lie in [-255, 255]");
    }
  }
  Image out = Image::like(img);
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = saturate_u8(static_cast<long long>(src[i]) + offsets[i % 3]);
  }
  return out;
}

Image grayscale_overlay(const Image& img, double alpha) {
  check_unit(alpha, "overlay alpha");
  if (alpha == 0.0 || img.channels() == 1) return img;
  return blend(img, to_grayscale(img), alpha);
}

}  // namespace leafforge
