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

#include <doctest.h>

#include <map>
#include <random>

#include "leafforge/error.hpp"
#include "leafforge/superpixel.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace leafforge;
using testing::constant_image;
using testing::random_image;

namespace {

Image quadrants(int w, int h) {
  const std::uint8_t colors[4][3] = {{220, 30, 30}, {30, 200, 40}, {20, 40, 210}, {240, 230, 30}};
  Image img(w, h, 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int q = (y >= h / 2 ? 2 : 0) + (x >= w / 2 ? 1 : 0);
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = colors[q][c];
    }
  }
  return img;
}

}  // namespace

TEST_SUITE("superpixel") {
  TEST_CASE("lab conversion of reference colors") {
    const auto white = srgb_to_lab(255, 255, 255);
    CHECK(white[0] == doctest::Approx(100.0).epsilon(1e-4));
    CHECK(white[1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-3));
    CHECK(white[2] == doctest::Approx(0.0).scale(1.0).epsilon(1e-3));
    const auto black = srgb_to_lab(0, 0, 0);
    CHECK(black[0] == doctest::Approx(0.0));
    const auto red = srgb_to_lab(255, 0, 0);
    CHECK(red[0] == doctest::Approx(53.24).epsilon(1e-3));
    CHECK(red[1] == doctest::Approx(80.09).epsilon(1e-3));
    CHECK(red[2] == doctest::Approx(67.20).epsilon(1e-3));
  }

  TEST_CASE("one requested segment covers everything") {
    const auto seg = slic_segment(random_image(20, 15, 3, 1), 1);
    CHECK(seg.segments == 1);
    for (auto l : seg.labels) CHECK(l == 0);
  }

  TEST_CASE("flat quadrants become four segments") {
    const Image img = quadrants(32, 32);
    const auto seg = slic_segment(img, 4);
    REQUIRE(seg.segments == 4);
    std::map<int, int> label_of_quadrant;
    for (int y = 0; y < 32; ++y) {
      for (int x = 0; x < 32; ++x) {
        const int q = (y >= 16 ? 2 : 0) + (x >= 16 ? 1 : 0);
        const auto [it, fresh] = label_of_quadrant.emplace(q, seg.at(x, y));
        REQUIRE(it->second == seg.at(x, y));
      }
    }
    CHECK(label_of_quadrant.size() == 4);
  }

  TEST_CASE("random inputs give connected partitions") {
    std::mt19937_64 gen(31);
    for (int t = 0; t < 40; ++t) {
      const int n = 1 + static_cast<int>(gen() % 60);
      const Image img = random_image(32, 32, t % 3 == 0 ? 1 : 3, gen());
      const auto seg = slic_segment(img, n);
      REQUIRE(seg.width == 32);
      REQUIRE(seg.height == 32);
      REQUIRE(seg.segments <= n);
      REQUIRE(oracle::connected_partition(seg));
      REQUIRE(is_connected_partition(seg));
    }
    const auto thin = slic_segment(random_image(50, 2, 3, 4), 30);
    CHECK(thin.segments <= 30);
    CHECK(oracle::connected_partition(thin));
    const auto every = slic_segment(random_image(4, 4, 3, 5), 16);
    CHECK(oracle::connected_partition(every));
  }

  TEST_CASE("the library partition check rejects bad maps") {
    SegmentMap seg{2, 2, 2, {0, 1, 1, 0}};
    CHECK_FALSE(is_connected_partition(seg));
    seg.labels = {0, 0, 1, 1};
    CHECK(is_connected_partition(seg));
    seg.labels = {0, 0, 0, 0};
    CHECK_FALSE(is_connected_partition(seg));
    seg.labels = {0, 0, 2, 2};
    CHECK_FALSE(is_connected_partition(seg));
  }

  TEST_CASE("segmentation is deterministic") {
    const Image img = testing::synthetic_leaf(64, 64, 3, true);
    const auto a = slic_segment(img, 50);
    const auto b = slic_segment(img, 50);
    CHECK(a.labels == b.labels);
  }

  TEST_CASE("invalid requests") {
    const Image img = random_image(4, 4, 3, 0);
    CHECK_THROWS_AS(slic_segment(img, 0), Error);
    CHECK_THROWS_AS(slic_segment(img, 17), Error);
    CHECK_THROWS_AS(slic_segment(img, 4, 10.0, 0), Error);
    CHECK_THROWS_AS(slic_segment(img, 4, 0.0), Error);
  }

  TEST_CASE("replacement") {
    const Image img = random_image(24, 24, 3, 2);
    const auto seg = slic_segment(img, 20);
    RngStream r0(1);
    CHECK(superpixel_replace(img, seg, 0.0, r0) == img);

    const Image flat = constant_image(24, 24, 3, 61);
    RngStream r1(2);
    CHECK(superpixel_replace(flat, slic_segment(flat, 9), 1.0, r1) == flat);

    Image two(2, 1, 1);
    two.at(0, 0) = 10;
    two.at(1, 0) = 20;
    RngStream r2(3);
    const Image merged = superpixel_replace(two, SegmentMap{2, 1, 1, {0, 0}}, 1.0, r2);
    CHECK(merged.at(0, 0) == 15);
    CHECK(merged.at(1, 0) == 15);

    RngStream r3(4);
    const Image full = superpixel_replace(img, seg, 1.0, r3);
    std::vector<std::array<int, 3>> value(static_cast<std::size_t>(seg.segments), {-1, -1, -1});
    for (int y = 0; y < 24; ++y) {
      for (int x = 0; x < 24; ++x) {
        auto& v = value[static_cast<std::size_t>(seg.at(x, y))];
        for (int c = 0; c < 3; ++c) {
          if (v[static_cast<std::size_t>(c)] < 0) v[static_cast<std::size_t>(c)] = full.at(x, y, c);
          REQUIRE(v[static_cast<std::size_t>(c)] == full.at(x, y, c));
        }
      }
    }

    RngStream r4(5);
    CHECK_THROWS_AS(superpixel_replace(random_image(5, 5, 3, 0), seg, 0.5, r4), Error);
  }

  TEST_CASE("partial replacement leaves other segments alone") {
    const Image img = random_image(40, 40, 3, 8);
    const auto seg = slic_segment(img, 30);
    RngStream r(9);
    const Image out = superpixel_replace(img, seg, 0.5, r);
    int replaced = 0, untouched = 0;
    for (int s = 0; s < seg.segments; ++s) {
      bool same = true;
      for (std::size_t p = 0; p < seg.labels.size(); ++p) {
        if (seg.labels[p] != s) continue;
        for (int c = 0; c < 3; ++c) same = same && out.data()[p * 3 + c] == img.data()[p * 3 + c];
      }
      (same ? untouched : replaced) += 1;
    }
    CHECK(replaced > 0);
    CHECK(untouched > 0);
  }
}
