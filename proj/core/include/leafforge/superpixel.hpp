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

/// Per-pixel segment labels. Labels are dense in [0, segments) and each
/// segment is 4-connected.
struct SegmentMap {
  int width = 0;
  int height = 0;
  int segments = 0;
  std::vector<std::int32_t> labels;  // row-major

  std::int32_t at(int x, int y) const noexcept {
    return labels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(x)];
  }
};

/// sRGB byte triple to CIE L*a*b* (D65 white).
std::array<double, 3> srgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept;

/**
 * SLIC clustering in (L, a, b, x, y).
 *
 * Centers start on a regular grid of at most `requested` cells with spacing
 * S = sqrt(w * h / requested). Each iteration assigns pixels within +-S of a
 * center by D^2 = dc^2 + (compactness * dxy / S)^2 and then moves centers to
 * their cluster means. A final pass splits disconnected clusters, merges
 * regions smaller than S^2 / 4 into their largest neighbour (ties: longest
 * shared boundary, then lowest id), and keeps merging the smallest region
 * until at most `requested` remain.
 *
 * Throws InvalidParam when requested is outside [1, w * h], iterations < 1 or
 * compactness <= 0.
 */
SegmentMap slic_segment(const Image& img, int requested, double compactness = 10.0,
                        int iterations = 10);

/// Replaces each segment by its rounded per-channel mean with probability
/// `p_replace`; one Bernoulli draw per segment in label order.
Image superpixel_replace(const Image& img, const SegmentMap& seg, double p_replace,
                         RngStream& rng);

/// True when labels are dense, in range and every segment is 4-connected.
bool is_connected_partition(const SegmentMap& seg);

}  // namespace leafforge
