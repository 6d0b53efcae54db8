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

/**
 * @file pipeline.hpp
 * @brief Probabilistic augmentation sequence with replayable records.
 *
 * A PipelineConfig is an ordered list of stages. Each stage fires with its
 * own probability and, when it fires, draws concrete strengths uniformly from
 * its ranges. The draws for one run form an AugRecord; applying a record is
 * free of randomness, so a record always reproduces the same bytes.
 *
 * Every random value is derived from a SeedSpec (master seed, image id,
 * repetition index) plus the stage index, so results do not depend on the
 * order in which a batch is scheduled.
 */

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "leafforge/geometric.hpp"
#include "leafforge/image.hpp"
#include "leafforge/photometric.hpp"

namespace leafforge {

/// Order matches the alternatives of StageRanges and StageParams.
enum class StageOp {
  HFlip,
  VFlip,
  Affine,
  Superpixel,
  Blur,
  SharpenOrEmboss,
  GrayscaleOverlay,
  GaussianNoise,
  Dropout,
  BrightnessContrast,
  Elastic,
  ChannelShift,
};

inline constexpr std::size_t kStageOpCount = 12;

std::string_view to_string(StageOp op) noexcept;
std::optional<StageOp> parse_stage_op(std::string_view name) noexcept;

/// Closed sampling interval.
struct Range {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const Range&, const Range&) = default;
};

struct IntRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  friend bool operator==(const IntRange&, const IntRange&) = default;
};

// Sampling ranges, one struct per operator. Member initializers are the
// default scheme.

struct HFlipRanges {
  friend bool operator==(const HFlipRanges&, const HFlipRanges&) = default;
};
struct VFlipRanges {
  friend bool operator==(const VFlipRanges&, const VFlipRanges&) = default;
};

struct AffineRanges {
  Range scale_x{0.8, 1.2};
  Range scale_y{0.8, 1.2};
  Range translate_x{-0.2, 0.2};
  Range translate_y{-0.2, 0.2};
  Range rotate{-45.0, 45.0};
  Range shear{-16.0, 16.0};
  friend bool operator==(const AffineRanges&, const AffineRanges&) = default;
};

struct SuperpixelRanges {
  IntRange segments{20, 200};
  Range p_replace{0.5, 0.5};
  double compactness = 10.0;
  int iterations = 10;
  friend bool operator==(const SuperpixelRanges&, const SuperpixelRanges&) = default;
};

struct BlurRanges {
  std::vector<BlurMethod> methods{BlurMethod::Gaussian, BlurMethod::Average,
                                  BlurMethod::Median};
  Range sigma{0.5, 2.0};
  IntRange kernel{3, 7};  // odd bounds; only odd sizes are drawn
  friend bool operator==(const BlurRanges&, const BlurRanges&) = default;
};

struct SharpenEmbossRanges {
  Range sharpen_alpha{0.0, 1.0};
  Range lightness{0.75, 1.5};
  Range emboss_alpha{0.0, 1.0};
  Range strength{0.0, 2.0};
  friend bool operator==(const SharpenEmbossRanges&, const SharpenEmbossRanges&) = default;
};

struct OverlayRanges {
  Range alpha{0.0, 1.0};
  friend bool operator==(const OverlayRanges&, const OverlayRanges&) = default;
};

struct NoiseRanges {
  Range sigma{0.0, 12.75};
  double per_channel_probability = 0.5;
  friend bool operator==(const NoiseRanges&, const NoiseRanges&) = default;
};

struct DropoutRanges {
  Range fraction{0.01, 0.1};
  Range patch_frac{0.02, 0.02};
  friend bool operator==(const DropoutRanges&, const DropoutRanges&) = default;
};

struct BrightnessContrastRanges {
  Range add{-25.0, 25.0};
  Range mul{0.5, 2.0};
  friend bool operator==(const BrightnessContrastRanges&,
                         const BrightnessContrastRanges&) = default;
};

struct ElasticRanges {
  int rows = 4;
  int cols = 4;
  Range jitter{0.01, 0.05};
  friend bool operator==(const ElasticRanges&, const ElasticRanges&) = default;
};

struct ChannelShiftRanges {
  IntRange offset{-50, 50};  // drawn independently per channel
  friend bool operator==(const ChannelShiftRanges&, const ChannelShiftRanges&) = default;
};

using StageRanges =
    std::variant<HFlipRanges, VFlipRanges, AffineRanges, SuperpixelRanges, BlurRanges,
                 SharpenEmbossRanges, OverlayRanges, NoiseRanges, DropoutRanges,
                 BrightnessContrastRanges, ElasticRanges, ChannelShiftRanges>;

struct StageConfig {
  double probability = 0.5;
  StageRanges ranges;

  StageOp op() const noexcept { return static_cast<StageOp>(ranges.index()); }

  /// Stage for `op` with the default ranges.
  static StageConfig make(StageOp op, double probability);

  friend bool operator==(const StageConfig&, const StageConfig&) = default;
};

inline constexpr int kConfigVersion = 1;

struct PipelineConfig {
  int version = kConfigVersion;
  std::vector<StageConfig> stages;
  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// hflip 0.5, vflip 0.2, then affine, superpixel, blur, sharpen/emboss,
/// grayscale overlay, gaussian noise, dropout, brightness/contrast and
/// elastic at 0.5 each. Channel shift is not part of the default scheme.
PipelineConfig default_config();

/// Throws ValidationError describing the first offending field.
void validate(const PipelineConfig& config);

/// Parses the JSON config document. Missing range keys take the operator
/// defaults; unknown keys and ops are rejected. Throws ParseError for
/// malformed JSON and ValidationError for schema or bound violations.
PipelineConfig parse_config(std::string_view text);
PipelineConfig load_config(const std::string& path);

/// Canonical pretty-printed JSON; parse_config(serialize_config(c)) == c.
std::string serialize_config(const PipelineConfig& config);

// Concrete strengths for one firing, one struct per operator.

struct HFlipParams {
  friend bool operator==(const HFlipParams&, const HFlipParams&) = default;
};
struct VFlipParams {
  friend bool operator==(const VFlipParams&, const VFlipParams&) = default;
};

struct SuperpixelParams {
  int segments = 100;
  double p_replace = 0.5;
  double compactness = 10.0;
  int iterations = 10;
  friend bool operator==(const SuperpixelParams&, const SuperpixelParams&) = default;
};

struct SharpenEmbossParams {
  bool emboss = false;
  double alpha = 0.0;
  double amount = 1.0;  // lightness for sharpen, strength for emboss
  friend bool operator==(const SharpenEmbossParams&, const SharpenEmbossParams&) = default;
};

struct OverlayParams {
  double alpha = 0.0;
  friend bool operator==(const OverlayParams&, const OverlayParams&) = default;
};

struct BrightnessContrastParams {
  double add = 0.0;
  double mul = 1.0;
  friend bool operator==(const BrightnessContrastParams&,
                         const BrightnessContrastParams&) = default;
};

struct ChannelShiftParams {
  std::array<int, 3> offsets{0, 0, 0};
  friend bool operator==(const ChannelShiftParams&, const ChannelShiftParams&) = default;
};

using StageParams =
    std::variant<HFlipParams, VFlipParams, AffineParams, SuperpixelParams, BlurSpec,
                 SharpenEmbossParams, OverlayParams, NoiseSpec, DropoutSpec,
                 BrightnessContrastParams, DistortGrid, ChannelShiftParams>;

/// Flattened (name, value) view of a parameter set, for summaries and tests.
std::vector<std::pair<std::string, double>> param_values(const StageParams& params);

struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::string image_id;
  std::uint64_t rep_index = 0;
  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

enum class StreamPurpose : std::uint64_t { Sample = 1, Apply = 2 };

/**
 * Seed of the random stream for one stage of one run:
 *
 *   k = mix64(master_seed ^ 0x4C45414646524745)
 *   k = combine64(k, fnv1a64(image_id))
 *   k = combine64(k, rep_index)
 *   k = combine64(k, stage_index)
 *   k = combine64(k, purpose)
 *
 * Sample streams drive the fire/strength draws; Apply streams feed the
 * operators that consume randomness (noise, dropout, superpixel, elastic).
 */
std::uint64_t stream_seed(const SeedSpec& seed, std::size_t stage_index,
                          StreamPurpose purpose) noexcept;

struct StageRecord {
  StageOp op = StageOp::HFlip;
  bool fired = false;
  std::optional<StageParams> params;  // set iff fired
  friend bool operator==(const StageRecord&, const StageRecord&) = default;
};

/// The materialized draw of one run. Also used as the plan to execute.
struct AugRecord {
  SeedSpec seed;
  std::vector<StageRecord> stages;
  friend bool operator==(const AugRecord&, const AugRecord&) = default;
};
using AugPlan = AugRecord;

AugPlan sample_plan(const PipelineConfig& config, const SeedSpec& seed);

/// Applies fired stages in order. Randomness used by operators comes from
/// the plan's SeedSpec, so this is a pure function of (img, plan).
Image apply_plan(const Image& img, const AugPlan& plan);

struct AugResult {
  Image image;
  AugRecord record;
};

AugResult augment(const Image& img, const PipelineConfig& config, const SeedSpec& seed);

std::string serialize_record(const AugRecord& record);
AugRecord parse_record(std::string_view text);

/// Per-stage fire counts and parameter summaries over sampled plans.
struct ParamSummary {
  std::string name;
  std::size_t count = 0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

struct StageStats {
  StageOp op = StageOp::HFlip;
  double probability = 0.0;
  std::size_t fired = 0;
  double rate = 0.0;
  std::vector<ParamSummary> params;
};

struct PlanStats {
  std::size_t samples = 0;
  std::vector<StageStats> stages;
};

/// Samples plans for SeedSpec(master_seed, image_id, i), i in [0, samples).
/// Throws ValidationError when samples == 0.
PlanStats compute_plan_stats(const PipelineConfig& config, std::size_t samples,
                             std::uint64_t master_seed,
                             const std::string& image_id = "stats");

}  // namespace leafforge
