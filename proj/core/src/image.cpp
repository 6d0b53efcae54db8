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

#include "leafforge/image.hpp"

#include <cmath>
#include <string>

#include "leafforge/error.hpp"
#include "sampling.hpp"

namespace leafforge {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::DecodeError: return "DecodeError";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidDimension: return "InvalidDimension";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ChannelMismatch: return "ChannelMismatch";
    case ErrorCode::SingularTransform: return "SingularTransform";
    case ErrorCode::InvalidParam: return "InvalidParam";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::NotEnoughImages: return "NotEnoughImages";
    case ErrorCode::MissingClass: return "MissingClass";
    case ErrorCode::OutputNotEmpty: return "OutputNotEmpty";
    case ErrorCode::ManifestMissing: return "ManifestMissing";
  }
  return "Unknown";
}

namespace {

void check_geometry(int width, int height, int channels) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::InvalidDimension,
                "image size must be at least 1x1, got " + std::to_string(width) +
                    "x" + std::to_string(height));
  }
  if (channels != 1 && channels != 3) {
    throw Error(ErrorCode::InvalidDimension,
                "channel count must be 1 or 3, got " + std::to_string(channels));
  }
}

}  // namespace

Image::Image(int width, int height, int channels)
    : width_(width), height_(height), channels_(channels) {
  check_geometry(width, height, channels);
  data_.assign(pixel_count() * static_cast<std::size_t>(channels), 0);
}

Image::Image(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  check_geometry(width, height, channels);
  if (data_.size() != pixel_count() * static_cast<std::size_t>(channels)) {
    throw Error(ErrorCode::InvalidDimension,
                "sample buffer holds " + std::to_string(data_.size()) +
                    " bytes, expected " +
                    std::to_string(pixel_count() * static_cast<std::size_t>(channels)));
  }
}

int resolve_border(int i, int n, BorderMode::Kind kind) noexcept {
  if (i >= 0 && i < n) return i;
  switch (kind) {
    case BorderMode::Kind::Constant:
      return -1;
    case BorderMode::Kind::Replicate:
      return i < 0 ? 0 : n - 1;
    case BorderMode::Kind::Reflect: {
      // Symmetric reflection (edge sample repeated): ... c b a | a b c ...
      const long long period = 2LL * n;
      long long m = i % period;
      if (m < 0) m += period;
      if (m >= n) m = period - 1 - m;
      return static_cast<int>(m);
    }
  }
  return 0;
}

bool is_valid(const Image& img) noexcept {
  if (img.width() < 1 || img.height() < 1) return false;
  if (img.channels() != 1 && img.channels() != 3) return false;
  return img.size() == img.pixel_count() * static_cast<std::size_t>(img.channels());
}

Image resize(const Image& img, int width, int height, Interp interp) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::InvalidDimension,
                "resize target must be at least 1x1, got " + std::to_string(width) +
                    "x" + std::to_string(height));
  }
  Image out(width, height, img.channels());
  const int C = img.channels();
  const long long in_w = img.width();
  const long long in_h = img.height();

  if (interp == Interp::Nearest) {
    // Pixel-center mapping in exact integer arithmetic:
    // src = floor((dst + 0.5) * in / out).
    for (int y = 0; y < height; ++y) {
      const int sy = static_cast<int>(((2LL * y + 1) * in_h) / (2LL * height));
      for (int x = 0; x < width; ++x) {
        const int sx = static_cast<int>(((2LL * x + 1) * in_w) / (2LL * width));
        for (int c = 0; c < C; ++c) out.at(x, y, c) = img.at(sx, sy, c);
      }
    }
    return out;
  }

  const double fx = static_cast<double>(in_w) / width;
  const double fy = static_cast<double>(in_h) / height;
  const auto border = BorderMode::replicate();
  for (int y = 0; y < height; ++y) {
    const double sy = (y + 0.5) * fy - 0.5;
    for (int x = 0; x < width; ++x) {
      const double sx = (x + 0.5) * fx - 0.5;
      for (int c = 0; c < C; ++c) {
        out.at(x, y, c) = saturate_u8(detail::sample_bilinear(img, sx, sy, c, border));
      }
    }
  }
  return out;
}

Image to_grayscale(const Image& img) {
  if (img.channels() == 1) return img;
  Image out(img.width(), img.height(), 1);
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0, n = img.pixel_count(); i < n; ++i) {
    const int r = src[3 * i];
    const int g = src[3 * i + 1];
    const int b = src[3 * i + 2];
    // Weights scaled by 1000 so rounding is exact: +500 rounds half up,
    // which equals half-away-from-zero for non-negative sums.
    dst[i] = static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
  }
  return out;
}

Image expand_channels(const Image& img, int channels) {
  if (img.channels() == channels) return img;
  if (img.channels() != 1 || channels != 3) {
    throw Error(ErrorCode::ChannelMismatch,
                "can only broadcast 1 channel to 3, got " +
                    std::to_string(img.channels()) + " -> " + std::to_string(channels));
  }
  Image out(img.width(), img.height(), 3);
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0, n = img.pixel_count(); i < n; ++i) {
    dst[3 * i] = dst[3 * i + 1] = dst[3 * i + 2] = src[i];
  }
  return out;
}

Image blend(const Image& a, const Image& b, double alpha) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::DimensionMismatch,
                "blend operands differ in size: " + std::to_string(a.width()) + "x" +
                    std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                    "x" + std::to_string(b.height()));
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::InvalidParam, "blend alpha must lie in [0,1]");
  }
  if (b.channels() != a.channels() && b.channels() != 1) {
    throw Error(ErrorCode::ChannelMismatch,
                "blend overlay must have 1 channel or match the base image");
  }
  if (alpha == 0.0) return a;

  Image out = Image::like(a);
  const int C = a.channels();
  const bool broadcast = b.channels() != C;
  auto pa = a.data();
  auto pb = b.data();
  auto po = out.data();
  const double keep = 1.0 - alpha;
  for (std::size_t i = 0, n = a.pixel_count(); i < n; ++i) {
    for (int c = 0; c < C; ++c) {
      const std::size_t ia = i * C + c;
      const std::size_t ib = broadcast ? i : ia;
      po[ia] = saturate_u8(keep * pa[ia] + alpha * pb[ib]);
    }
  }
  return out;
}

}  // namespace leafforge
