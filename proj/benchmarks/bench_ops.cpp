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

#include <benchmark/benchmark.h>

#include "leafforge/geometric.hpp"
#include "leafforge/photometric.hpp"
#include "leafforge/pipeline.hpp"
#include "leafforge/png_io.hpp"
#include "leafforge/superpixel.hpp"
#include "support.hpp"

using namespace leafforge;

namespace {

const Image& leaf(int side) {
  static const Image small = testing::synthetic_leaf(64, 64, 1, true);
  static const Image large = testing::synthetic_leaf(256, 256, 1, true);
  return side <= 64 ? small : large;
}

void BM_AffineBilinear(benchmark::State& state) {
  const Image& img = leaf(static_cast<int>(state.range(0)));
  const AffineParams p{1.1, 0.9, 0.05, -0.05, 30, 8};
  for (auto _ : state) benchmark::DoNotOptimize(affine(img, p));
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(img.pixel_count()));
}
BENCHMARK(BM_AffineBilinear)->Arg(64)->Arg(256);

void BM_GaussianBlur(benchmark::State& state) {
  const Image& img = leaf(256);
  const double sigma = static_cast<double>(state.range(0)) / 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(blur(img, BlurSpec::gaussian(sigma)));
}
BENCHMARK(BM_GaussianBlur)->Arg(5)->Arg(20);

void BM_MedianBlur(benchmark::State& state) {
  const Image& img = leaf(256);
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(blur(img, BlurSpec::median(k)));
}
BENCHMARK(BM_MedianBlur)->Arg(3)->Arg(7);

void BM_Sharpen(benchmark::State& state) {
  const Image& img = leaf(256);
  for (auto _ : state) benchmark::DoNotOptimize(sharpen(img, 0.6, 1.2));
}
BENCHMARK(BM_Sharpen);

void BM_Slic(benchmark::State& state) {
  const Image& img = leaf(256);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(slic_segment(img, n));
}
BENCHMARK(BM_Slic)->Arg(20)->Arg(200);

void BM_GaussianNoise(benchmark::State& state) {
  const Image& img = leaf(256);
  RngStream rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(add_gaussian_noise(img, {8.0, true}, rng));
}
BENCHMARK(BM_GaussianNoise);

void BM_AugmentDefault(benchmark::State& state) {
  const Image& img = leaf(256);
  const PipelineConfig config = default_config();
  std::uint64_t rep = 0;
  for (auto _ : state) benchmark::DoNotOptimize(augment(img, config, {1, "bench", rep++}).image);
}
BENCHMARK(BM_AugmentDefault);

void BM_EncodePng(benchmark::State& state) {
  const Image img = augment(leaf(256), default_config(), {1, "bench", 3}).image;
  for (auto _ : state) benchmark::DoNotOptimize(encode_png(img));
}
BENCHMARK(BM_EncodePng);

}  // namespace

BENCHMARK_MAIN();
