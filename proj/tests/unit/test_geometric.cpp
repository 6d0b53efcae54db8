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

#include <random>

#include "leafforge/error.hpp"
#include "leafforge/geometric.hpp"
#include "leafforge/random.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace leafforge;
using testing::constant_image;
using testing::from_rows;
using testing::random_image;

namespace {

Image rotate180_bruteforce(const Image& img) {
  Image out = Image::like(img);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < img.channels(); ++c) {
        out.at(x, y, c) = img.at(img.width() - 1 - x, img.height() - 1 - y, c);
      }
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("ops-geometric") {
  TEST_CASE("flips follow their index maps") {
    const Image img = from_rows({{1, 2}, {3, 4}});
    CHECK(flip_horizontal(img) == from_rows({{2, 1}, {4, 3}}));
    CHECK(flip_vertical(img) == from_rows({{3, 4}, {1, 2}}));

    const Image col_const = from_rows({{5, 5, 5}, {9, 9, 9}});
    CHECK(flip_horizontal(col_const) == col_const);

    for (int c : {1, 3}) {
      const Image r = random_image(7, 4, c, 3 + c);
      CHECK(flip_horizontal(flip_horizontal(r)) == r);
      CHECK(flip_vertical(flip_vertical(r)) == r);
      CHECK(flip_vertical(flip_horizontal(r)) == rotate180_bruteforce(r));
    }
    const Image r3 = random_image(3, 3, 1, 99);
    CHECK(flip_vertical(flip_horizontal(r3)) == rotate180_bruteforce(r3));
  }

  TEST_CASE("identity affine is the identity") {
    const Image img = random_image(12, 9, 3, 1);
    CHECK(affine(img, {}, Interp::Nearest, BorderMode::constant(0)) == img);
    CHECK(affine(img, {}, Interp::Bilinear, BorderMode::reflect()) == img);
  }

  TEST_CASE("rotation by 180 on an odd square equals both flips") {
    const Image img = random_image(5, 5, 3, 21);
    AffineParams p;
    p.rotate = 180;
    CHECK(affine(img, p, Interp::Nearest, BorderMode::constant(0)) ==
          flip_horizontal(flip_vertical(img)));
  }

  TEST_CASE("fractional translation shifts whole columns") {
    const Image img = random_image(10, 4, 1, 5);
    AffineParams p;
    p.translate_x = 0.2;
    const Image out = affine(img, p, Interp::Nearest, BorderMode::constant(0));
    for (int y = 0; y < 4; ++y) {
      for (int x = 0; x < 10; ++x) {
        CHECK(out.at(x, y) == (x < 2 ? 0 : img.at(x - 2, y)));
      }
    }
  }

  TEST_CASE("forward matrix and its inverse") {
    AffineParams p{1.1, 0.9, 0.1, -0.05, 30, 10};
    const Affine2D m = affine_matrix(p, 20, 10);
    const Affine2D id = m * m.inverse();
    CHECK(id.m[0] == doctest::Approx(1.0));
    CHECK(id.m[1] == doctest::Approx(0.0));
    CHECK(id.m[2] == doctest::Approx(0.0));
    CHECK(id.m[4] == doctest::Approx(1.0));
    const auto o = oracle::forward_matrix(p, 20, 10);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 3; ++j) CHECK(m.m[3 * i + j] == o[i][j]);
    }
    const Affine2D degenerate{{1, 2, 0, 2, 4, 0}};
    CHECK_THROWS_AS(degenerate.inverse(), Error);
  }

  TEST_CASE("invalid affine parameters are rejected") {
    const Image img = random_image(4, 4, 1, 0);
    for (AffineParams p : {AffineParams{0, 1}, AffineParams{1, -2}, AffineParams{1, 1, 1.5},
                           AffineParams{1, 1, 0, 0, 0, 90}}) {
      CHECK_THROWS_AS(affine(img, p), Error);
    }
  }

  TEST_CASE("nearest affine equals the inverse-map oracle") {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const BorderMode borders[] = {BorderMode::constant(17), BorderMode::reflect(),
                                  BorderMode::replicate()};
    for (int t = 0; t < 300; ++t) {
      const int w = 1 + static_cast<int>(u(gen) * 16);
      const int h = 1 + static_cast<int>(u(gen) * 16);
      const int c = u(gen) < 0.5 ? 1 : 3;
      const Image img = random_image(w, h, c, gen());
      AffineParams p{0.5 + u(gen), 0.5 + u(gen), u(gen) * 0.6 - 0.3, u(gen) * 0.6 - 0.3,
                     u(gen) * 360 - 180, u(gen) * 60 - 30};
      if (t % 10 == 0) p = AffineParams{1, 1, 0, 0, 90.0 * (t / 10 % 4), 0};
      const BorderMode b = borders[t % 3];
      REQUIRE(affine(img, p, Interp::Nearest, b) == oracle::affine_nearest(img, p, b));
    }
  }

  TEST_CASE("bilinear affine keeps constants under reflect border") {
    const Image img = constant_image(9, 7, 3, 77);
    AffineParams p{1.2, 0.8, 0.1, -0.2, 33, -12};
    CHECK(affine(img, p) == img);
  }

  TEST_CASE("dimensions and channels are preserved") {
    RngStream rng(5);
    for (int c : {1, 3}) {
      const Image img = random_image(13, 6, c, 8);
      AffineParams p{1.1, 0.9, 0.1, 0.1, 10, 5};
      CHECK(affine(img, p).same_shape(img));
      CHECK(elastic_distort(img, {}, rng).same_shape(img));
      CHECK(flip_horizontal(img).same_shape(img));
    }
  }

  TEST_CASE("elastic distortion") {
    const Image img = random_image(32, 24, 3, 6);
    RngStream a(11);
    CHECK(elastic_distort(img, {4, 4, 0.0}, a) == img);

    const Image flat = constant_image(32, 24, 3, 140);
    RngStream b(12);
    CHECK(elastic_distort(flat, {5, 3, 0.2}, b) == flat);

    RngStream c1(13), c2(13);
    const Image o1 = elastic_distort(img, {4, 4, 0.03}, c1);
    const Image o2 = elastic_distort(img, {4, 4, 0.03}, c2);
    CHECK(o1 == o2);
    CHECK(c1.next_u64() == c2.next_u64());
    CHECK_FALSE(o1 == img);

    RngStream bad(0);
    CHECK_THROWS_AS(elastic_distort(img, {1, 4, 0.03}, bad), Error);
    CHECK_THROWS_AS(elastic_distort(img, {4, 4, -0.1}, bad), Error);
  }

  TEST_CASE("elastic consumes the same draws whatever the jitter") {
    const Image img = random_image(8, 8, 1, 1);
    RngStream a(3), b(3);
    elastic_distort(img, {4, 5, 0.0}, a);
    elastic_distort(img, {4, 5, 0.05}, b);
    CHECK(a.next_u64() == b.next_u64());
  }
}
