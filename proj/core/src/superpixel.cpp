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

#include "leafforge/superpixel.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <utility>

#include "leafforge/error.hpp"

namespace leafforge {

namespace {

// sRGB decoding curve, one entry per byte value.
const std::array<double, 256>& srgb_linear_table() {
  static const std::array<double, 256> table = [] {
    std::array<double, 256> t{};
    for (int i = 0; i < 256; ++i) {
      const double c = i / 255.0;
      t[static_cast<std::size_t>(i)] =
          c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
    }
    return t;
  }();
  return table;
}

// Cube root for t in (0.008, 2]: exponent-third bit estimate refined by
// three Halley steps (cubic convergence, ~1 ulp).
double cube_root(double t) noexcept {
  double y = std::bit_cast<double>(std::bit_cast<std::uint64_t>(t) / 3 + 0x2A9F7893782DA1CEULL);
  for (int i = 0; i < 3; ++i) {
    const double y3 = y * y * y;
    y = y * (y3 + 2.0 * t) / (2.0 * y3 + t);
  }
  return y;
}

double lab_f(double t) noexcept {
  constexpr double delta = 6.0 / 29.0;
  if (!(t > delta * delta * delta)) return t / (3.0 * delta * delta) + 4.0 / 29.0;
  return t <= 2.0 ? cube_root(t) : std::cbrt(t);
}

struct Center {
  double l, a, b, x, y;
};

// Lab planes, one value per pixel.
struct Features {
  std::vector<double> l, a, b;
};

Features lab_features(const Image& img) {
  const std::size_t n = img.pixel_count();
  Features f{std::vector<double>(n), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  auto src = img.data();
  if (img.channels() == 1) {
    for (std::size_t i = 0; i < n; ++i) f.l[i] = srgb_to_lab(src[i], src[i], src[i])[0];
    return f;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto lab = srgb_to_lab(src[3 * i], src[3 * i + 1], src[3 * i + 2]);
    f.l[i] = lab[0];
    f.a[i] = lab[1];
    f.b[i] = lab[2];
  }
  return f;
}

int enforce_connectivity(std::vector<std::int32_t>& labels, int W, int H, double min_size,
                         int max_segments) {
  const std::size_t N = labels.size();
  std::vector<std::int32_t> comp(N, -1);
  std::vector<long long> size;
  std::vector<std::pair<int, int>> stack;
  for (std::size_t start = 0; start < N; ++start) {
    if (comp[start] >= 0) continue;
    const auto id = static_cast<std::int32_t>(size.size());
    const auto lab = labels[start];
    long long count = 0;
    comp[start] = id;
    stack.emplace_back(static_cast<int>(start % W), static_cast<int>(start / W));
    while (!stack.empty()) {
      const auto [x, y] = stack.back();
      stack.pop_back();
      ++count;
      const std::size_t p = static_cast<std::size_t>(y) * W + x;
      const auto visit = [&](std::size_t q, int qx, int qy) {
        if (comp[q] < 0 && labels[q] == lab) {
          comp[q] = id;
          stack.emplace_back(qx, qy);
        }
      };
      if (x > 0) visit(p - 1, x - 1, y);
      if (x + 1 < W) visit(p + 1, x + 1, y);
      if (y > 0) visit(p - W, x, y - 1);
      if (y + 1 < H) visit(p + W, x, y + 1);
    }
    size.push_back(count);
  }

  // Adjacency as per-component vectors sorted by neighbour id, with the
  // number of shared 4-neighbour edges.
  using Edge = std::pair<std::int32_t, long long>;
  const std::size_t K = size.size();
  std::vector<std::size_t> offset(K + 1, 0);
  const auto for_each_boundary = [&](auto&& visit) {
    for (int y = 0; y < H; ++y) {
      for (int x = 0; x < W; ++x) {
        const std::size_t p = static_cast<std::size_t>(y) * W + x;
        if (x + 1 < W && comp[p] != comp[p + 1]) visit(comp[p], comp[p + 1]);
        if (y + 1 < H && comp[p] != comp[p + W]) visit(comp[p], comp[p + W]);
      }
    }
  };
  for_each_boundary([&](std::int32_t u, std::int32_t v) {
    ++offset[static_cast<std::size_t>(u) + 1];
    ++offset[static_cast<std::size_t>(v) + 1];
  });
  for (std::size_t k = 0; k < K; ++k) offset[k + 1] += offset[k];
  std::vector<std::int32_t> nbr(offset[K]);
  {
    std::vector<std::size_t> fill(offset.begin(), offset.end() - 1);
    for_each_boundary([&](std::int32_t u, std::int32_t v) {
      nbr[fill[static_cast<std::size_t>(u)]++] = v;
      nbr[fill[static_cast<std::size_t>(v)]++] = u;
    });
  }
  std::vector<std::vector<Edge>> adj(K);
  for (std::size_t k = 0; k < K; ++k) {
    const auto first = nbr.begin() + static_cast<std::ptrdiff_t>(offset[k]);
    const auto last = nbr.begin() + static_cast<std::ptrdiff_t>(offset[k + 1]);
    std::sort(first, last);
    for (auto it = first; it != last;) {
      const auto run = std::find_if(it, last, [&](std::int32_t v) { return v != *it; });
      adj[k].emplace_back(*it, static_cast<long long>(run - it));
      it = run;
    }
  }
  nbr = {};

  const auto slot = [](std::vector<Edge>& list, std::int32_t id) {
    return std::lower_bound(list.begin(), list.end(), id,
                            [](const Edge& e, std::int32_t v) { return e.first < v; });
  };
  const auto add_edges = [&](std::vector<Edge>& list, std::int32_t id, long long n) {
    const auto it = slot(list, id);
    if (it != list.end() && it->first == id) {
      it->second += n;
    } else {
      list.insert(it, {id, n});
    }
  };
  const auto remove_edges = [&](std::vector<Edge>& list, std::int32_t id) {
    const auto it = slot(list, id);
    if (it != list.end() && it->first == id) list.erase(it);
  };

  std::vector<std::int32_t> parent(K);
  std::set<std::pair<long long, std::int32_t>> order;
  for (std::size_t k = 0; k < K; ++k) {
    parent[k] = static_cast<std::int32_t>(k);
    order.emplace(size[k], static_cast<std::int32_t>(k));
  }

  std::vector<Edge> merged;
  while (order.size() > 1) {
    const auto [smallest, victim] = *order.begin();
    if (static_cast<double>(smallest) >= min_size &&
        order.size() <= static_cast<std::size_t>(max_segments)) {
      break;
    }
    // Dominant neighbour: largest, then longest shared boundary, then lower id.
    std::int32_t target = -1;
    long long best_edge = -1;
    for (const auto& [nb, edges] : adj[victim]) {
      if (target < 0 || size[nb] > size[target] ||
          (size[nb] == size[target] && edges > best_edge)) {
        target = nb;
        best_edge = edges;
      }
    }
    if (target < 0) break;  // isolated, cannot happen on a connected grid

    order.erase({size[victim], victim});
    order.erase({size[target], target});
    size[target] += size[victim];
    order.emplace(size[target], target);

    auto& into = adj[target];
    auto& from = adj[victim];
    for (const auto& [nb, edges] : from) {
      if (nb == target) continue;
      auto& back = adj[nb];
      remove_edges(back, victim);
      add_edges(back, target, edges);
    }
    merged.clear();
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < into.size() || j < from.size()) {
      if (j == from.size() || (i < into.size() && into[i].first < from[j].first)) {
        if (into[i].first != victim) merged.push_back(into[i]);
        ++i;
      } else if (i == into.size() || from[j].first < into[i].first) {
        if (from[j].first != target) merged.push_back(from[j]);
        ++j;
      } else {
        merged.emplace_back(into[i].first, into[i].second + from[j].second);
        ++i;
        ++j;
      }
    }
    into.swap(merged);
    from = {};
    parent[victim] = target;
  }

  auto find = [&](std::int32_t k) {
    std::int32_t root = k;
    while (parent[root] != root) root = parent[root];
    while (parent[k] != root) {
      const std::int32_t next = parent[k];
      parent[k] = root;
      k = next;
    }
    return root;
  };

  std::vector<std::int32_t> dense(K, -1);
  int next = 0;
  for (std::size_t p = 0; p < N; ++p) {
    const std::int32_t root = find(comp[p]);
    if (dense[root] < 0) dense[root] = next++;
    labels[p] = dense[root];
  }
  return next;
}

}  // namespace

std::array<double, 3> srgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
  const auto& lin = srgb_linear_table();
  const double R = lin[r], G = lin[g], B = lin[b];
  const double X = 0.4124564 * R + 0.3575761 * G + 0.1804375 * B;
  const double Y = 0.2126729 * R + 0.7151522 * G + 0.0721750 * B;
  const double Z = 0.0193339 * R + 0.1191920 * G + 0.9503041 * B;
  const double fx = lab_f(X / 0.95047);
  const double fy = lab_f(Y / 1.0);
  const double fz = lab_f(Z / 1.08883);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

SegmentMap slic_segment(const Image& img, int requested, double compactness, int iterations) {
  const int W = img.width();
  const int H = img.height();
  const auto N = static_cast<long long>(img.pixel_count());
  if (requested < 1 || requested > N) {
    throw Error(ErrorCode::InvalidParam, "requested superpixels must lie in [1, " +
                                             std::to_string(N) + "], got " +
                                             std::to_string(requested));
  }
  if (iterations < 1) throw Error(ErrorCode::InvalidParam, "SLIC needs at least one iteration");
  if (!(compactness > 0.0)) throw Error(ErrorCode::InvalidParam, "compactness must be positive");

  const double S = std::sqrt(static_cast<double>(N) / requested);
  int nx = std::clamp(static_cast<int>(std::lround(W / S)), 1, W);
  int ny = std::clamp(static_cast<int>(std::lround(H / S)), 1, H);
  while (static_cast<long long>(nx) * ny > requested) {
    // Drop a column or row from whichever axis has the narrower cells.
    const bool narrow_columns = static_cast<long long>(W) * ny <= static_cast<long long>(H) * nx;
    if (ny == 1 || (nx > 1 && narrow_columns)) {
      --nx;
    } else {
      --ny;
    }
  }

  const auto features = lab_features(img);
  SegmentMap seg;
  seg.width = W;
  seg.height = H;
  seg.labels.resize(static_cast<std::size_t>(N));

  std::vector<Center> centers;
  centers.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double cx = (i + 0.5) * W / nx - 0.5;
      const double cy = (j + 0.5) * H / ny - 0.5;
      const auto px = static_cast<std::size_t>(std::lround(cy)) * W +
                      static_cast<std::size_t>(std::lround(cx));
      centers.push_back({features.l[px], features.a[px], features.b[px], cx, cy});
    }
  }
  for (int y = 0; y < H; ++y) {
    const int cy = static_cast<int>(static_cast<long long>(y) * ny / H);
    for (int x = 0; x < W; ++x) {
      const int cx = static_cast<int>(static_cast<long long>(x) * nx / W);
      seg.labels[static_cast<std::size_t>(y) * W + x] = cy * nx + cx;
    }
  }

  const double spatial = (compactness / S) * (compactness / S);
  const int radius = static_cast<int>(std::ceil(S));
  std::vector<double> best(static_cast<std::size_t>(N));
  struct Accum {
    double l = 0, a = 0, b = 0, x = 0, y = 0;
    long long n = 0;
  };
  std::vector<Accum> acc(centers.size());

  for (int it = 0; it < iterations; ++it) {
    std::fill(best.begin(), best.end(), std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < centers.size(); ++k) {
      const Center& c = centers[k];
      const int x0 = std::max(0, static_cast<int>(std::floor(c.x)) - radius);
      const int x1 = std::min(W - 1, static_cast<int>(std::ceil(c.x)) + radius);
      const int y0 = std::max(0, static_cast<int>(std::floor(c.y)) - radius);
      const int y1 = std::min(H - 1, static_cast<int>(std::ceil(c.y)) + radius);
      for (int y = y0; y <= y1; ++y) {
        const double dy = y - c.y;
        const std::size_t row = static_cast<std::size_t>(y) * W;
        const double* fl = features.l.data() + row;
        const double* fa = features.a.data() + row;
        const double* fb = features.b.data() + row;
        double* b = best.data() + row;
        std::int32_t* lab = seg.labels.data() + row;
        const double dyy = dy * dy;
        const auto id = static_cast<std::int32_t>(k);
        for (int x = x0; x <= x1; ++x) {
          const double dl = fl[x] - c.l, da = fa[x] - c.a, db = fb[x] - c.b;
          const double dx = x - c.x;
          const double d = dl * dl + da * da + db * db + spatial * (dx * dx + dyy);
          const bool closer = d < b[x];
          b[x] = closer ? d : b[x];
          lab[x] = closer ? id : lab[x];
        }
      }
    }

    std::fill(acc.begin(), acc.end(), Accum{});
    for (int y = 0; y < H; ++y) {
      for (int x = 0; x < W; ++x) {
        const std::size_t p = static_cast<std::size_t>(y) * W + x;
        Accum& a = acc[static_cast<std::size_t>(seg.labels[p])];
        a.l += features.l[p];
        a.a += features.a[p];
        a.b += features.b[p];
        a.x += x;
        a.y += y;
        ++a.n;
      }
    }
    for (std::size_t k = 0; k < centers.size(); ++k) {
      const Accum& a = acc[k];
      if (a.n == 0) continue;
      const double inv = 1.0 / static_cast<double>(a.n);
      centers[k] = {a.l * inv, a.a * inv, a.b * inv, a.x * inv, a.y * inv};
    }
  }

  seg.segments = enforce_connectivity(seg.labels, W, H, S * S / 4.0, requested);
  return seg;
}

Image superpixel_replace(const Image& img, const SegmentMap& seg, double p_replace,
                         RngStream& rng) {
  if (seg.width != img.width() || seg.height != img.height() ||
      seg.labels.size() != img.pixel_count()) {
    throw Error(ErrorCode::DimensionMismatch, "segment map does not match image size");
  }
  if (!(p_replace >= 0.0 && p_replace <= 1.0)) {
    throw Error(ErrorCode::InvalidParam, "p_replace must lie in [0,1]");
  }
  if (p_replace == 0.0) return img;

  const int C = img.channels();
  const auto K = static_cast<std::size_t>(seg.segments);
  std::vector<long long> sums(K * C, 0);
  std::vector<long long> counts(K, 0);
  auto src = img.data();
  for (std::size_t p = 0; p < seg.labels.size(); ++p) {
    const auto k = static_cast<std::size_t>(seg.labels[p]);
    ++counts[k];
    for (int c = 0; c < C; ++c) sums[k * C + c] += src[p * C + c];
  }

  std::vector<std::uint8_t> replace(K, 0);
  std::vector<std::uint8_t> mean(K * C, 0);
  for (std::size_t k = 0; k < K; ++k) {
    replace[k] = rng.bernoulli(p_replace);
    if (counts[k] == 0) continue;
    for (int c = 0; c < C; ++c) {
      mean[k * C + c] = static_cast<std::uint8_t>((2 * sums[k * C + c] + counts[k]) /
                                                  (2 * counts[k]));
    }
  }

  Image out = img;
  auto dst = out.data();
  for (std::size_t p = 0; p < seg.labels.size(); ++p) {
    const auto k = static_cast<std::size_t>(seg.labels[p]);
    if (!replace[k]) continue;
    for (int c = 0; c < C; ++c) dst[p * C + c] = mean[k * C + c];
  }
  return out;
}

bool is_connected_partition(const SegmentMap& seg) {
  const std::size_t N = static_cast<std::size_t>(seg.width) * seg.height;
  if (seg.segments < 1 || seg.labels.size() != N) return false;
  std::vector<long long> seen(static_cast<std::size_t>(seg.segments), 0);
  for (const auto l : seg.labels) {
    if (l < 0 || l >= seg.segments) return false;
    ++seen[static_cast<std::size_t>(l)];
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) return false;

  // One flood fill per label must reach all of its pixels.
  std::vector<std::uint8_t> visited(N, 0);
  std::vector<std::uint8_t> started(static_cast<std::size_t>(seg.segments), 0);
  std::vector<std::size_t> stack;
  const int W = seg.width;
  for (std::size_t s = 0; s < N; ++s) {
    if (visited[s]) continue;
    const auto lab = seg.labels[s];
    if (started[static_cast<std::size_t>(lab)]) return false;
    started[static_cast<std::size_t>(lab)] = 1;
    visited[s] = 1;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      const int x = static_cast<int>(p % W);
      const int y = static_cast<int>(p / W);
      const std::size_t nbrs[4] = {x > 0 ? p - 1 : N, x + 1 < W ? p + 1 : N,
                                   y > 0 ? p - W : N, y + 1 < seg.height ? p + W : N};
      for (const std::size_t q : nbrs) {
        if (q < N && !visited[q] && seg.labels[q] == lab) {
          visited[q] = 1;
          stack.push_back(q);
        }
      }
    }
  }
  return true;
}

}  // namespace leafforge
