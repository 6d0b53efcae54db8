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
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace leafforge {

/**
 * Owned row-major 8-bit raster with 1 (gray) or 3 (RGB) interleaved channels.
 *
 * Operators never mutate their input; they build a fresh Image. The sample
 * vector always holds exactly width * height * channels bytes.
 */
class Image {
 public:
  Image() = default;

  /// Zero-filled image. Throws InvalidDimension for zero sizes or a channel
  /// count other than 1 or 3.
  Image(int width, int height, int channels);

  /// Adopts `data`; throws InvalidDimension when its length does not match.
  Image(int width, int height, int channels, std::vector<std::uint8_t> data);

  /// Same geometry as `like`, zero-filled.
  static Image like(const Image& like) {
    return Image(like.width(), like.height(), like.channels());
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  std::size_t size() const noexcept { return data_.size(); }

  std::size_t index(int x, int y, int c = 0) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(c);
  }

  std::uint8_t at(int x, int y, int c = 0) const noexcept {
    return data_[index(x, y, c)];
  }
  std::uint8_t& at(int x, int y, int c = 0) noexcept {
    return data_[index(x, y, c)];
  }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> data() noexcept { return data_; }

  std::span<const std::uint8_t> row(int y) const noexcept {
    return std::span<const std::uint8_t>(data_).subspan(
        index(0, y), static_cast<std::size_t>(width_) * channels_);
  }

  bool same_shape(const Image& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_ &&
           channels_ == other.channels_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> data_;
};

enum class Interp { Nearest, Bilinear };

/// How a sampler resolves coordinates that fall outside the image.
struct BorderMode {
  enum class Kind { Constant, Reflect, Replicate };
  Kind kind = Kind::Reflect;
  std::uint8_t value = 0;  // only read for Constant

  static constexpr BorderMode constant(std::uint8_t v) { return {Kind::Constant, v}; }
  static constexpr BorderMode reflect() { return {Kind::Reflect, 0}; }
  static constexpr BorderMode replicate() { return {Kind::Replicate, 0}; }

  friend bool operator==(const BorderMode&, const BorderMode&) = default;
};

/// Round half away from zero, then clamp to [0, 255]. The one quantization
/// rule used by every operator.
inline std::uint8_t saturate_u8(double v) noexcept {
  if (!(v > 0.0)) return 0;
  if (v >= 254.5) return 255;
  const int i = static_cast<int>(v);  // v - i is exact here
  return static_cast<std::uint8_t>(i + (v - i >= 0.5 ? 1 : 0));
}

inline std::uint8_t saturate_u8(long long v) noexcept {
  return static_cast<std::uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v));
}

/// Maps an arbitrary integer coordinate into [0, n) per the border rule.
/// Returns -1 for Constant when the coordinate is outside.
int resolve_border(int i, int n, BorderMode::Kind kind) noexcept;

/// Checks the Image invariants; true for every image produced by this library.
bool is_valid(const Image& img) noexcept;

Image resize(const Image& img, int width, int height, Interp interp);

/// BT.601 luma, round(0.299 R + 0.587 G + 0.114 B). Gray input is returned
/// unchanged.
Image to_grayscale(const Image& img);

/// Broadcasts a 1-channel image to `channels` (1 or 3).
Image expand_channels(const Image& img, int channels);

/// out = round((1 - alpha) * a + alpha * b). A 1-channel `b` is broadcast
/// across the channels of `a`.
Image blend(const Image& a, const Image& b, double alpha);

}  // namespace leafforge
