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
#include <cstdint>
#include <vector>

#include "leafforge/image.hpp"
#include "leafforge/random.hpp"

namespace leafforge {

enum class BlurMethod { Gaussian, Average, Median };

struct BlurSpec {
  BlurMethod method = BlurMethod::Gaussian;
  double sigma = 1.0;  // Gaussian only
  int kernel = 3;      // Average / Median window side, odd and >= 3

  static BlurSpec gaussian(double sigma) { return {BlurMethod::Gaussian, sigma, 3}; }
  static BlurSpec average(int k) { return {BlurMethod::Average, 1.0, k}; }
  static BlurSpec median(int k) { return {BlurMethod::Median, 1.0, k}; }

  friend bool operator==(const BlurSpec&, const BlurSpec&) = default;
};

struct NoiseSpec {
  double sigma = 0.0;  // on the 0..255 scale
  bool per_channel = false;

  friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

struct DropoutSpec {
  double fraction = 0.0;    // target dropped share of the image area
  double patch_frac = 0.02;  // patch side relative to min(width, height)

  friend bool operator==(const DropoutSpec&, const DropoutSpec&) = default;
};

void validate(const BlurSpec& spec);
void validate(const NoiseSpec& spec);
void validate(const DropoutSpec& spec);

/// Fixed-point scale of one Gaussian tap; a 2-D tap is the product of two.
inline constexpr int kGaussianFracBits = 20;

/// Normalized continuous taps exp(-i^2 / 2 sigma^2), i in [-r, r] with
/// r = ceil(3 sigma). Sums to 1.
std::vector<double> gaussian_kernel(double sigma);

/// gaussian_kernel quantized to integers summing to exactly 2^20, symmetric.
/// This is what blur() convolves with.
std::vector<std::int64_t> gaussian_kernel_fixed(double sigma);

/// Gaussian (separable, fixed point), box mean or median. Reflect border.
Image blur(const Image& img, const BlurSpec& spec);

/// 3x3 kernel [-1 -1 -1; -1 8+L -1; -1 -1 -1] divided by L, then
/// blend(img, sharpened, alpha).
Image sharpen(const Image& img, double alpha, double lightness);

/// 3x3 kernel [-1-s -s 0; -s 1 s; 0 s 1+s] (weights sum to 1, so no offset),
/// then blend(img, embossed, alpha).
Image emboss(const Image& img, double alpha, double strength);

/// Naive 3x3 correlation with reflect border, accumulated in double in
/// row-major kernel order and divided by `divisor` before quantization.
Image convolve3x3(const Image& img, const std::array<double, 9>& kernel, double divisor = 1.0);

/// Adds N(0, sigma^2) per pixel (shared across channels) or per sample when
/// per_channel is set. Normals come from the stream in polar-method pairs,
/// row-major.
Image add_gaussian_noise(const Image& img, const NoiseSpec& spec, RngStream& rng);

/// Zeroes square patches at random positions until the union covers at least
/// fraction * area, or the attempt budget (10x the expected patch count)
/// runs out.
Image coarse_dropout(const Image& img, const DropoutSpec& spec, RngStream& rng);

/// out = round(mul * (in - 128) + 128 + add).
Image brightness_contrast(const Image& img, double add, double mul);

/// RGB only; throws ChannelMismatch otherwise.
Image channel_shift(const Image& img, const std::array<int, 3>& offsets);

/// blend(img, gray(img), alpha).
Image grayscale_overlay(const Image& img, double alpha);

}  // namespace leafforge
