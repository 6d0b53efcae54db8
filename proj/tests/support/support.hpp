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

// Fixtures shared by the unit and acceptance suites. Random inputs come from
// std::mt19937_64 so they do not depend on the library's own generator.

#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "leafforge/image.hpp"
#include "leafforge/png_io.hpp"

namespace leafforge::testing {

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "lf") {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

inline Image random_image(int w, int h, int c, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> byte(0, 255);
  Image img(w, h, c);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(byte(gen));
  return img;
}

inline Image constant_image(int w, int h, int c, std::uint8_t value) {
  Image img(w, h, c);
  for (auto& v : img.data()) v = value;
  return img;
}

inline Image from_rows(const std::vector<std::vector<int>>& rows) {
  Image img(static_cast<int>(rows[0].size()), static_cast<int>(rows.size()), 1);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      img.at(x, y) = static_cast<std::uint8_t>(rows[static_cast<std::size_t>(y)]
                                                   [static_cast<std::size_t>(x)]);
    }
  }
  return img;
}

/// A smooth leaf-like RGB picture: shaded background, elliptical blade with a
/// midrib and a few lesion spots, light sensor noise.
inline Image synthetic_leaf(int w, int h, std::uint64_t seed, bool diseased) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> jitter(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double cx = w * (0.5 + 0.05 * jitter(gen));
  const double cy = h * (0.5 + 0.05 * jitter(gen));
  const double ax = w * (0.38 + 0.04 * unit(gen));
  const double ay = h * (0.24 + 0.04 * unit(gen));
  const double tilt = 0.6 * (unit(gen) - 0.5);
  struct Spot {
    double x, y, r;
  };
  std::vector<Spot> spots;
  const int n_spots = diseased ? 6 + static_cast<int>(unit(gen) * 6) : 0;
  for (int i = 0; i < n_spots; ++i) {
    spots.push_back({cx + ax * (unit(gen) - 0.5), cy + ay * (unit(gen) - 0.5),
                     0.02 * w + 0.03 * w * unit(gen)});
  }
  Image img(w, h, 3);
  const double ct = std::cos(tilt), st = std::sin(tilt);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dx = x - cx, dy = y - cy;
      const double u = (ct * dx + st * dy) / ax;
      const double v = (-st * dx + ct * dy) / ay;
      double r = 92 + 20.0 * x / w, g = 84 + 18.0 * y / h, b = 70;
      if (u * u + v * v < 1.0) {
        r = 48 + 20 * v;
        g = 132 + 30 * u;
        b = 44;
        if (std::abs(v) < 0.04) {
          r += 40;
          g += 40;
          b += 30;
        }
        for (const Spot& s : spots) {
          if ((x - s.x) * (x - s.x) + (y - s.y) * (y - s.y) < s.r * s.r) {
            r = 128;
            g = 92;
            b = 40;
          }
        }
      }
      const double n = 3.0 * jitter(gen);
      img.at(x, y, 0) = saturate_u8(r + n);
      img.at(x, y, 1) = saturate_u8(g + n);
      img.at(x, y, 2) = saturate_u8(b + n);
    }
  }
  return img;
}

/// root/<class>/leaf_NNN.png, `per_class` images per class.
inline void write_leaf_tree(const std::filesystem::path& root,
                            const std::vector<std::string>& classes, int per_class, int size,
                            std::uint64_t seed = 1) {
  for (std::size_t c = 0; c < classes.size(); ++c) {
    for (int i = 0; i < per_class; ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "leaf_%03d.png", i);
      save_png(synthetic_leaf(size, size, seed * 1000003 + c * 1000 + i, c % 2 == 1),
               root / classes[c] / name);
    }
  }
}

inline std::vector<std::uint8_t> file_bytes(const std::filesystem::path& p) {
  return read_file(p);
}

}  // namespace leafforge::testing
