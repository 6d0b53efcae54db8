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

#include <cmath>
#include <set>

#include "leafforge/error.hpp"
#include "leafforge/pipeline.hpp"
#include "leafforge/random.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace leafforge;
using testing::random_image;

namespace {

ErrorCode parse_error_code(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("config accepted: " << text);
  return ErrorCode::IoError;
}

PipelineConfig single(StageOp op, double p = 1.0) {
  PipelineConfig c;
  c.stages.push_back(StageConfig::make(op, p));
  return c;
}

std::size_t fired_count(const AugRecord& r) {
  std::size_t n = 0;
  for (const auto& s : r.stages) n += s.fired ? 1 : 0;
  return n;
}

}  // namespace

TEST_SUITE("random") {
  TEST_CASE("reference vectors") {
    RngStream zero(0);
    CHECK(zero.next_u64() == 0xE220A8397B1DCDAFULL);
    CHECK(zero.next_u64() == 0x6E789E6AA1B965F4ULL);
    CHECK(fnv1a64("") == 0xCBF29CE484222325ULL);
    CHECK(fnv1a64("a") == 0xAF63DC4C8601EC8CULL);
    CHECK(combine64(1, 2) == mix64(1 ^ mix64(2 + kGoldenGamma)));
  }

  TEST_CASE("uniform draws stay in range") {
    RngStream r(42);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
      const double u = r.uniform();
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      sum += u;
    }
    CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
    CHECK(r.uniform(3.0, 3.0) == 3.0);
  }

  TEST_CASE("integers are unbiased over a small range") {
    RngStream r(7);
    std::array<int, 7> hist{};
    const int n = 70000;
    for (int i = 0; i < n; ++i) {
      const auto v = r.uniform_int(-3, 3);
      REQUIRE(v >= -3);
      REQUIRE(v <= 3);
      ++hist[static_cast<std::size_t>(v + 3)];
    }
    double chi2 = 0.0;
    for (int h : hist) chi2 += (h - n / 7.0) * (h - n / 7.0) / (n / 7.0);
    CHECK(chi2 < 22.46);  // chi-square, 6 dof, p = 0.001
    CHECK(r.uniform_int(5, 5) == 5);
  }

  TEST_CASE("normals have unit variance") {
    RngStream r(9);
    double s = 0, s2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double z = r.normal();
      s += z;
      s2 += z * z;
    }
    CHECK(std::abs(s / n) < 4.0 / std::sqrt(n));
    CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_SUITE("pipeline") {
  TEST_CASE("default scheme") {
    const auto c = default_config();
    const StageOp order[] = {StageOp::HFlip,          StageOp::VFlip,
                             StageOp::Affine,         StageOp::Superpixel,
                             StageOp::Blur,           StageOp::SharpenOrEmboss,
                             StageOp::GrayscaleOverlay, StageOp::GaussianNoise,
                             StageOp::Dropout,        StageOp::BrightnessContrast,
                             StageOp::Elastic};
    REQUIRE(c.stages.size() == std::size(order));
    for (std::size_t i = 0; i < c.stages.size(); ++i) {
      CHECK(c.stages[i].op() == order[i]);
      CHECK(c.stages[i].probability == (i == 1 ? 0.2 : 0.5));
    }
    const auto& a = std::get<AffineRanges>(c.stages[2].ranges);
    CHECK(a.rotate == Range{-45, 45});
    CHECK(a.shear == Range{-16, 16});
    CHECK(a.scale_x == Range{0.8, 1.2});
    CHECK(a.scale_y == Range{0.8, 1.2});
    CHECK(a.translate_x == Range{-0.2, 0.2});
    CHECK(a.translate_y == Range{-0.2, 0.2});
    CHECK(std::get<SuperpixelRanges>(c.stages[3].ranges).segments == IntRange{20, 200});
    const auto& noise = std::get<NoiseRanges>(c.stages[7].ranges);
    CHECK(noise.sigma == Range{0.0, 12.75});
    CHECK(noise.per_channel_probability == 0.5);
    CHECK(std::get<DropoutRanges>(c.stages[8].ranges).fraction == Range{0.01, 0.1});
    CHECK(std::get<BrightnessContrastRanges>(c.stages[9].ranges).mul == Range{0.5, 2.0});
    CHECK(std::get<ElasticRanges>(c.stages[10].ranges).jitter == Range{0.01, 0.05});
    for (const auto& s : c.stages) CHECK(s.op() != StageOp::ChannelShift);
    CHECK_NOTHROW(validate(c));
  }

  TEST_CASE("op names round trip") {
    for (std::size_t i = 0; i < kStageOpCount; ++i) {
      const auto op = static_cast<StageOp>(i);
      CHECK(parse_stage_op(to_string(op)) == op);
    }
    CHECK_FALSE(parse_stage_op("sepia").has_value());
  }

  TEST_CASE("config serialization round trip") {
    const auto c = default_config();
    CHECK(parse_config(serialize_config(c)) == c);

    PipelineConfig all;
    for (std::size_t i = kStageOpCount; i-- > 0;) {
      all.stages.push_back(StageConfig::make(static_cast<StageOp>(i), 0.1 * (i % 10)));
    }
    std::get<BlurRanges>(all.stages[kStageOpCount - 1 - 4].ranges).methods = {BlurMethod::Median};
    const auto back = parse_config(serialize_config(all));
    CHECK(back == all);
    CHECK(back.stages.front().op() == StageOp::ChannelShift);
  }

  TEST_CASE("a minimal document takes operator defaults") {
    const auto c = parse_config(R"({"version": 1, "stages": [
      {"op": "hflip", "probability": 0.5}, {"op": "vflip", "probability": 0.2},
      {"op": "affine", "probability": 0.5}, {"op": "superpixel", "probability": 0.5},
      {"op": "blur", "probability": 0.5}, {"op": "sharpen_or_emboss", "probability": 0.5},
      {"op": "grayscale_overlay", "probability": 0.5}, {"op": "gaussian_noise", "probability": 0.5},
      {"op": "dropout", "probability": 0.5}, {"op": "brightness_contrast", "probability": 0.5},
      {"op": "elastic", "probability": 0.5}]})");
    CHECK(c == default_config());
  }

  TEST_CASE("rotation-only stage") {
    const auto c = parse_config(R"({"version": 1, "stages": [{"op": "affine", "probability": 1,
      "scale_x": [1, 1], "scale_y": [1, 1], "translate_x": [0, 0], "translate_y": [0, 0],
      "rotate": [-45, 45], "shear": [0, 0]}]})");
    REQUIRE(c.stages.size() == 1);
    for (std::uint64_t rep = 0; rep < 50; ++rep) {
      const auto plan = sample_plan(c, {3, "leaf.png", rep});
      REQUIRE(plan.stages[0].fired);
      const auto& p = std::get<AffineParams>(*plan.stages[0].params);
      CHECK(p.scale_x == 1.0);
      CHECK(p.translate_y == 0.0);
      CHECK(p.shear == 0.0);
      CHECK(std::abs(p.rotate) <= 45.0);
    }
  }

  TEST_CASE("invalid documents") {
    using E = ErrorCode;
    CHECK(parse_error_code("{") == E::ParseError);
    CHECK(parse_error_code("[]") == E::ValidationError);
    CHECK(parse_error_code(R"({"version": 1, "stages": []})") == E::ValidationError);
    CHECK(parse_error_code(R"({"version": 2, "stages": [{"op": "hflip", "probability": 1}]})") ==
          E::ValidationError);
    CHECK(parse_error_code(R"({"version": 1, "stages": [{"op": "hflip", "probability": 1.5}]})") ==
          E::ValidationError);
    CHECK(parse_error_code(R"({"version": 1, "stages": [{"op": "hflip", "probability": -0.1}]})") ==
          E::ValidationError);
    CHECK(parse_error_code(R"({"version": 1, "stages": [{"op": "sepia", "probability": 1}]})") ==
          E::ValidationError);
    CHECK(parse_error_code(
              R"({"version": 1, "stages": [{"op": "hflip", "probability": 1, "rotate": [0, 1]}]})") ==
          E::ValidationError);
    CHECK(parse_error_code(
              R"({"version": 1, "stages": [{"op": "affine", "probability": 1, "rotate": [5, 1]}]})") ==
          E::ValidationError);
    CHECK(parse_error_code(
              R"({"version": 1, "stages": [{"op": "affine", "probability": 1, "shear": [0, 90]}]})") ==
          E::ValidationError);
    CHECK(parse_error_code(R"({"version": 1, "stages": [{"op": "channel_shift", "probability": 1,
              "offset": [0, 300]}]})") == E::ValidationError);
    CHECK(parse_error_code(R"({"version": 1, "stages": [{"op": "blur", "probability": 1,
              "kernel": [4, 8]}]})") == E::ValidationError);
    CHECK(parse_error_code(R"({"version": 1, "stages": [{"op": "superpixel", "probability": 1,
              "segments": [0, 10]}]})") == E::ValidationError);
    CHECK(parse_error_code(R"({"version": 1, "stages": [{"op": "blur", "probability": 1,
              "methods": ["gaussian", "gaussian"]}]})") == E::ValidationError);
    CHECK(parse_error_code(R"({"version": 1, "stages": [{"op": "affine", "probability": 1,
              "rotate": "wide"}]})") == E::ValidationError);
    CHECK_THROWS_AS(load_config("/nonexistent/leafforge.json"), Error);
  }

  TEST_CASE("stream seeds follow the documented derivation") {
    const SeedSpec s{99, "healthy/leaf_001.png", 17};
    std::uint64_t k = mix64(99 ^ 0x4C45414646524745ULL);
    k = combine64(k, fnv1a64("healthy/leaf_001.png"));
    k = combine64(k, 17);
    CHECK(stream_seed(s, 4, StreamPurpose::Sample) == combine64(combine64(k, 4), 1));
    CHECK(stream_seed(s, 4, StreamPurpose::Apply) == combine64(combine64(k, 4), 2));
  }

  TEST_CASE("zero probabilities fire nothing and apply nothing") {
    auto c = default_config();
    for (auto& s : c.stages) s.probability = 0.0;
    const Image img = random_image(16, 16, 3, 1);
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
      const auto plan = sample_plan(c, {1, "x", rep});
      REQUIRE(fired_count(plan) == 0);
      for (const auto& s : plan.stages) REQUIRE_FALSE(s.params.has_value());
      REQUIRE(apply_plan(img, plan) == img);
    }
  }

  TEST_CASE("plans are deterministic and replay exactly") {
    const auto c = default_config();
    const Image img = testing::synthetic_leaf(48, 40, 5, true);
    for (std::uint64_t rep = 0; rep < 30; ++rep) {
      const SeedSpec s{12345, "scab/leaf_007.png", rep};
      REQUIRE(sample_plan(c, s) == sample_plan(c, s));
      const auto [out, record] = augment(img, c, s);
      REQUIRE(record == sample_plan(c, s));
      REQUIRE(apply_plan(img, record) == out);
      const auto parsed = parse_record(serialize_record(record));
      REQUIRE(parsed == record);
      REQUIRE(apply_plan(img, parsed) == out);
      REQUIRE(augment(img, c, s).image == out);
    }
  }

  TEST_CASE("repetition index changes the plan") {
    const auto c = default_config();
    std::set<std::string> distinct;
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
      auto plan = sample_plan(c, {0, "a.png", rep});
      plan.seed = {};
      distinct.insert(serialize_record(plan));
    }
    CHECK(distinct.size() > 1);
    CHECK(distinct.size() >= 95);
  }

  TEST_CASE("single-stage plans equal the bare operator") {
    const Image img = random_image(20, 14, 3, 4);
    const auto h = augment(img, single(StageOp::HFlip), {1, "i", 0});
    CHECK(h.image == flip_horizontal(img));
    const auto v = augment(img, single(StageOp::VFlip), {1, "i", 0});
    CHECK(v.image == flip_vertical(img));

    const auto a = augment(img, single(StageOp::Affine), {2, "i", 3});
    CHECK(a.image ==
          affine(img, std::get<AffineParams>(*a.record.stages[0].params), Interp::Bilinear,
                 BorderMode::reflect()));
    const auto b = augment(img, single(StageOp::Blur), {2, "i", 4});
    CHECK(b.image == blur(img, std::get<BlurSpec>(*b.record.stages[0].params)));
    const auto bc = augment(img, single(StageOp::BrightnessContrast), {2, "i", 5});
    const auto& bp = std::get<BrightnessContrastParams>(*bc.record.stages[0].params);
    CHECK(bc.image == brightness_contrast(img, bp.add, bp.mul));
  }

  TEST_CASE("stages run in configured order") {
    auto bright = StageConfig::make(StageOp::BrightnessContrast, 1.0);
    std::get<BrightnessContrastRanges>(bright.ranges) = {{200, 200}, {1, 1}};
    auto shift = StageConfig::make(StageOp::ChannelShift, 1.0);
    std::get<ChannelShiftRanges>(shift.ranges).offset = {-100, -100};

    const Image img = testing::constant_image(4, 4, 3, 100);
    const auto first = augment(img, PipelineConfig{1, {bright, shift}}, {0, "o", 0});
    const auto second = augment(img, PipelineConfig{1, {shift, bright}}, {0, "o", 0});
    CHECK(first.image == testing::constant_image(4, 4, 3, 155));
    CHECK(second.image == testing::constant_image(4, 4, 3, 200));
  }

  TEST_CASE("stage streams are independent of other stages") {
    auto c = default_config();
    auto d = c;
    d.stages[0].probability = 1.0;
    d.stages[4].probability = 0.0;
    for (std::uint64_t rep = 0; rep < 40; ++rep) {
      const auto p = sample_plan(c, {5, "z", rep});
      const auto q = sample_plan(d, {5, "z", rep});
      for (std::size_t i : {2u, 3u, 7u, 10u}) REQUIRE(p.stages[i] == q.stages[i]);
    }
  }

  TEST_CASE("a fired stage without parameters is rejected") {
    const Image img = random_image(4, 4, 3, 0);
    AugRecord r{{0, "x", 0}, {{StageOp::Blur, true, std::nullopt}}};
    CHECK_THROWS_AS(apply_plan(img, r), Error);
    r.stages[0].params = StageParams{HFlipParams{}};
    CHECK_THROWS_AS(apply_plan(img, r), Error);
  }

  TEST_CASE("grayscale image meets channel shift") {
    const Image gray = random_image(6, 6, 1, 1);
    CHECK_THROWS_AS(augment(gray, single(StageOp::ChannelShift), {0, "g", 0}), Error);
    CHECK(augment(gray, default_config(), {0, "g", 1}).image.channels() == 1);
  }

  TEST_CASE("fire rates and parameter ranges") {
    const auto c = default_config();
    const auto stats = compute_plan_stats(c, 10000, 0);
    REQUIRE(stats.stages.size() == c.stages.size());
    for (const auto& s : stats.stages) {
      const double p = s.probability;
      CHECK(std::abs(s.rate - p) <= 3 * std::sqrt(p * (1 - p) / 10000.0));
    }
    std::vector<double> rot;
    for (std::uint64_t rep = 0; rep < 10000; ++rep) {
      const auto plan = sample_plan(c, {0, "stats", rep});
      if (const auto& st = plan.stages[2]; st.fired) {
        const auto& a = std::get<AffineParams>(*st.params);
        REQUIRE(a.scale_x >= 0.8);
        REQUIRE(a.scale_x <= 1.2);
        REQUIRE(std::abs(a.shear) <= 16);
        rot.push_back(a.rotate);
      }
      if (const auto& st = plan.stages[3]; st.fired) {
        const auto& sp = std::get<SuperpixelParams>(*st.params);
        REQUIRE(sp.segments >= 20);
        REQUIRE(sp.segments <= 200);
      }
      if (const auto& st = plan.stages[4]; st.fired) {
        const auto& b = std::get<BlurSpec>(*st.params);
        REQUIRE(b.kernel % 2 == 1);
      }
    }
    CHECK(oracle::ks_uniform(rot, -45, 45) < oracle::ks_critical(0.01, rot.size()));
    CHECK_THROWS_AS(compute_plan_stats(c, 0, 0), Error);
  }

  TEST_CASE("param summaries name every drawn value") {
    const auto v = param_values(StageParams{AffineParams{1.1, 0.9, 0.1, -0.1, 5, 2}});
    REQUIRE(v.size() == 6);
    CHECK(v[0].first == "scale_x");
    CHECK(v[4].second == 5.0);
  }
}
