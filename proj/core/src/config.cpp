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

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <string>

#include "codec.hpp"
#include "leafforge/error.hpp"
#include "leafforge/pipeline.hpp"
#include "leafforge/png_io.hpp"

namespace leafforge {

namespace {

constexpr std::array<std::string_view, kStageOpCount> kOpNames{
    "hflip",   "vflip",   "affine",              "superpixel", "blur",    "sharpen_or_emboss",
    "grayscale_overlay", "gaussian_noise", "dropout", "brightness_contrast", "elastic",
    "channel_shift"};

constexpr std::array<std::string_view, 3> kBlurNames{"gaussian", "average", "median"};

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::ValidationError, msg); }

void need(bool ok, const std::string& msg) {
  if (!ok) invalid(msg);
}

// Checks lo <= hi, finiteness and lower <= lo, hi <= upper (open ends when
// the matching flag is set).
void check_range(const Range& r, const std::string& what, double lower, double upper,
                 bool open_lower = false, bool open_upper = false) {
  need(std::isfinite(r.lo) && std::isfinite(r.hi), what + " must be finite");
  need(r.lo <= r.hi, what + " is empty (lo > hi)");
  need(open_lower ? r.lo > lower : r.lo >= lower,
       what + " lower bound " + std::to_string(r.lo) + " is out of bounds");
  need(open_upper ? r.hi < upper : r.hi <= upper,
       what + " upper bound " + std::to_string(r.hi) + " is out of bounds");
}

void check_int_range(const IntRange& r, const std::string& what, std::int64_t lower,
                     std::int64_t upper) {
  need(r.lo <= r.hi, what + " is empty (lo > hi)");
  need(r.lo >= lower && r.hi <= upper, what + " must lie within [" + std::to_string(lower) +
                                           ", " + std::to_string(upper) + "]");
}

void check_unit(double v, const std::string& what) {
  need(v >= 0.0 && v <= 1.0, what + " must lie in [0,1]");
}

struct StageValidator {
  std::string where;

  void operator()(const HFlipRanges&) const {}
  void operator()(const VFlipRanges&) const {}
  void operator()(const AffineRanges& r) const {
    check_range(r.scale_x, where + "scale_x", 0.0, 10.0, true);
    check_range(r.scale_y, where + "scale_y", 0.0, 10.0, true);
    check_range(r.translate_x, where + "translate_x", -1.0, 1.0);
    check_range(r.translate_y, where + "translate_y", -1.0, 1.0);
    check_range(r.rotate, where + "rotate", -360.0, 360.0);
    check_range(r.shear, where + "shear", -90.0, 90.0, true, true);
  }
  void operator()(const SuperpixelRanges& r) const {
    check_int_range(r.segments, where + "segments", 1, 100000);
    check_range(r.p_replace, where + "p_replace", 0.0, 1.0);
    need(std::isfinite(r.compactness) && r.compactness > 0.0,
         where + "compactness must be positive");
    need(r.iterations >= 1 && r.iterations <= 100, where + "iterations must lie in [1, 100]");
  }
  void operator()(const BlurRanges& r) const {
    need(!r.methods.empty(), where + "methods must name at least one blur");
    std::set<BlurMethod> seen(r.methods.begin(), r.methods.end());
    need(seen.size() == r.methods.size(), where + "methods contains duplicates");
    check_range(r.sigma, where + "sigma", 0.0, 50.0, true);
    check_int_range(r.kernel, where + "kernel", 3, 99);
    need(r.kernel.lo % 2 == 1 && r.kernel.hi % 2 == 1, where + "kernel bounds must be odd");
  }
  void operator()(const SharpenEmbossRanges& r) const {
    check_range(r.sharpen_alpha, where + "sharpen_alpha", 0.0, 1.0);
    check_range(r.lightness, where + "lightness", 0.5, 2.0);
    check_range(r.emboss_alpha, where + "emboss_alpha", 0.0, 1.0);
    check_range(r.strength, where + "strength", 0.0, 2.0);
  }
  void operator()(const OverlayRanges& r) const {
    check_range(r.alpha, where + "alpha", 0.0, 1.0);
  }
  void operator()(const NoiseRanges& r) const {
    check_range(r.sigma, where + "sigma", 0.0, 255.0);
    check_unit(r.per_channel_probability, where + "per_channel_probability");
  }
  void operator()(const DropoutRanges& r) const {
    check_range(r.fraction, where + "fraction", 0.0, 1.0);
    check_range(r.patch_frac, where + "patch_frac", 0.0, 1.0, true);
  }
  void operator()(const BrightnessContrastRanges& r) const {
    check_range(r.add, where + "add", -255.0, 255.0);
    check_range(r.mul, where + "mul", 0.0, 4.0, true);
  }
  void operator()(const ElasticRanges& r) const {
    need(r.rows >= 2 && r.rows <= 64 && r.cols >= 2 && r.cols <= 64,
         where + "rows and cols must lie in [2, 64]");
    check_range(r.jitter, where + "jitter", 0.0, 1.0);
  }
  void operator()(const ChannelShiftRanges& r) const {
    check_int_range(r.offset, where + "offset", -255, 255);
  }
};

// ---- JSON ----------------------------------------------------------------

using detail::Json;

Json to_json(const Range& r) { return Json::array({r.lo, r.hi}); }
Json to_json(const IntRange& r) { return Json::array({r.lo, r.hi}); }

/// Reads the keys of one stage object and rejects anything it did not ask for.
class StageReader {
 public:
  StageReader(const Json& obj, std::string where) : obj_(obj), where_(std::move(where)) {}

  void range(const char* key, Range& out) {
    const Json* v = take(key);
    if (v == nullptr) return;
    need(v->is_array() && v->size() == 2 && (*v)[0].is_number() && (*v)[1].is_number(),
         where_ + key + " must be a [lo, hi] pair of numbers");
    out = {(*v)[0].get<double>(), (*v)[1].get<double>()};
  }

  void int_range(const char* key, IntRange& out) {
    const Json* v = take(key);
    if (v == nullptr) return;
    need(v->is_array() && v->size() == 2 && (*v)[0].is_number_integer() &&
             (*v)[1].is_number_integer(),
         where_ + key + " must be a [lo, hi] pair of integers");
    out = {(*v)[0].get<std::int64_t>(), (*v)[1].get<std::int64_t>()};
  }

  void number(const char* key, double& out) {
    const Json* v = take(key);
    if (v == nullptr) return;
    need(v->is_number(), where_ + key + " must be a number");
    out = v->get<double>();
  }

  void integer(const char* key, int& out) {
    const Json* v = take(key);
    if (v == nullptr) return;
    need(v->is_number_integer(), where_ + key + " must be an integer");
    const auto value = v->get<std::int64_t>();
    need(value >= -1000000 && value <= 1000000, where_ + key + " is out of range");
    out = static_cast<int>(value);
  }

  void methods(const char* key, std::vector<BlurMethod>& out) {
    const Json* v = take(key);
    if (v == nullptr) return;
    need(v->is_array(), where_ + key + " must be an array of blur names");
    out.clear();
    for (const auto& item : *v) {
      need(item.is_string(), where_ + key + " entries must be strings");
      const auto name = item.get<std::string>();
      const auto it = std::find(kBlurNames.begin(), kBlurNames.end(), name);
      need(it != kBlurNames.end(), where_ + "unknown blur method '" + name + "'");
      out.push_back(static_cast<BlurMethod>(it - kBlurNames.begin()));
    }
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      need(used_.count(key) > 0, where_ + "unknown key '" + key + "'");
    }
  }

 private:
  const Json* take(const char* key) {
    used_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  const Json& obj_;
  std::string where_;
  std::set<std::string> used_{"op", "probability"};
};

struct RangesReader {
  StageReader& in;

  void operator()(HFlipRanges&) const {}
  void operator()(VFlipRanges&) const {}
  void operator()(AffineRanges& r) const {
    in.range("scale_x", r.scale_x);
    in.range("scale_y", r.scale_y);
    in.range("translate_x", r.translate_x);
    in.range("translate_y", r.translate_y);
    in.range("rotate", r.rotate);
    in.range("shear", r.shear);
  }
  void operator()(SuperpixelRanges& r) const {
    in.int_range("segments", r.segments);
    in.range("p_replace", r.p_replace);
    in.number("compactness", r.compactness);
    in.integer("iterations", r.iterations);
  }
  void operator()(BlurRanges& r) const {
    in.methods("methods", r.methods);
    in.range("sigma", r.sigma);
    in.int_range("kernel", r.kernel);
  }
  void operator()(SharpenEmbossRanges& r) const {
    in.range("sharpen_alpha", r.sharpen_alpha);
    in.range("lightness", r.lightness);
    in.range("emboss_alpha", r.emboss_alpha);
    in.range("strength", r.strength);
  }
  void operator()(OverlayRanges& r) const { in.range("alpha", r.alpha); }
  void operator()(NoiseRanges& r) const {
    in.range("sigma", r.sigma);
    in.number("per_channel_probability", r.per_channel_probability);
  }
  void operator()(DropoutRanges& r) const {
    in.range("fraction", r.fraction);
    in.range("patch_frac", r.patch_frac);
  }
  void operator()(BrightnessContrastRanges& r) const {
    in.range("add", r.add);
    in.range("mul", r.mul);
  }
  void operator()(ElasticRanges& r) const {
    in.integer("rows", r.rows);
    in.integer("cols", r.cols);
    in.range("jitter", r.jitter);
  }
  void operator()(ChannelShiftRanges& r) const { in.int_range("offset", r.offset); }
};

struct RangesWriter {
  Json& out;

  void operator()(const HFlipRanges&) const {}
  void operator()(const VFlipRanges&) const {}
  void operator()(const AffineRanges& r) const {
    out["scale_x"] = to_json(r.scale_x);
    out["scale_y"] = to_json(r.scale_y);
    out["translate_x"] = to_json(r.translate_x);
    out["translate_y"] = to_json(r.translate_y);
    out["rotate"] = to_json(r.rotate);
    out["shear"] = to_json(r.shear);
  }
  void operator()(const SuperpixelRanges& r) const {
    out["segments"] = to_json(r.segments);
    out["p_replace"] = to_json(r.p_replace);
    out["compactness"] = r.compactness;
    out["iterations"] = r.iterations;
  }
  void operator()(const BlurRanges& r) const {
    Json names = Json::array();
    for (const auto m : r.methods) names.push_back(kBlurNames[static_cast<std::size_t>(m)]);
    out["methods"] = std::move(names);
    out["sigma"] = to_json(r.sigma);
    out["kernel"] = to_json(r.kernel);
  }
  void operator()(const SharpenEmbossRanges& r) const {
    out["sharpen_alpha"] = to_json(r.sharpen_alpha);
    out["lightness"] = to_json(r.lightness);
    out["emboss_alpha"] = to_json(r.emboss_alpha);
    out["strength"] = to_json(r.strength);
  }
  void operator()(const OverlayRanges& r) const { out["alpha"] = to_json(r.alpha); }
  void operator()(const NoiseRanges& r) const {
    out["sigma"] = to_json(r.sigma);
    out["per_channel_probability"] = r.per_channel_probability;
  }
  void operator()(const DropoutRanges& r) const {
    out["fraction"] = to_json(r.fraction);
    out["patch_frac"] = to_json(r.patch_frac);
  }
  void operator()(const BrightnessContrastRanges& r) const {
    out["add"] = to_json(r.add);
    out["mul"] = to_json(r.mul);
  }
  void operator()(const ElasticRanges& r) const {
    out["rows"] = r.rows;
    out["cols"] = r.cols;
    out["jitter"] = to_json(r.jitter);
  }
  void operator()(const ChannelShiftRanges& r) const { out["offset"] = to_json(r.offset); }
};

StageRanges default_ranges(StageOp op) {
  switch (op) {
    case StageOp::HFlip: return HFlipRanges{};
    case StageOp::VFlip: return VFlipRanges{};
    case StageOp::Affine: return AffineRanges{};
    case StageOp::Superpixel: return SuperpixelRanges{};
    case StageOp::Blur: return BlurRanges{};
    case StageOp::SharpenOrEmboss: return SharpenEmbossRanges{};
    case StageOp::GrayscaleOverlay: return OverlayRanges{};
    case StageOp::GaussianNoise: return NoiseRanges{};
    case StageOp::Dropout: return DropoutRanges{};
    case StageOp::BrightnessContrast: return BrightnessContrastRanges{};
    case StageOp::Elastic: return ElasticRanges{};
    case StageOp::ChannelShift: return ChannelShiftRanges{};
  }
  return HFlipRanges{};
}

}  // namespace

std::string_view to_string(StageOp op) noexcept {
  return kOpNames[static_cast<std::size_t>(op)];
}

std::optional<StageOp> parse_stage_op(std::string_view name) noexcept {
  const auto it = std::find(kOpNames.begin(), kOpNames.end(), name);
  if (it == kOpNames.end()) return std::nullopt;
  return static_cast<StageOp>(it - kOpNames.begin());
}

StageConfig StageConfig::make(StageOp op, double probability) {
  return StageConfig{probability, default_ranges(op)};
}

PipelineConfig default_config() {
  PipelineConfig config;
  config.stages = {
      StageConfig::make(StageOp::HFlip, 0.5),
      StageConfig::make(StageOp::VFlip, 0.2),
      StageConfig::make(StageOp::Affine, 0.5),
      StageConfig::make(StageOp::Superpixel, 0.5),
      StageConfig::make(StageOp::Blur, 0.5),
      StageConfig::make(StageOp::SharpenOrEmboss, 0.5),
      StageConfig::make(StageOp::GrayscaleOverlay, 0.5),
      StageConfig::make(StageOp::GaussianNoise, 0.5),
      StageConfig::make(StageOp::Dropout, 0.5),
      StageConfig::make(StageOp::BrightnessContrast, 0.5),
      StageConfig::make(StageOp::Elastic, 0.5),
  };
  return config;
}

void validate(const PipelineConfig& config) {
  need(config.version == kConfigVersion,
       "unsupported config version " + std::to_string(config.version));
  need(!config.stages.empty(), "config must contain at least one stage");
  for (std::size_t i = 0; i < config.stages.size(); ++i) {
    const auto& stage = config.stages[i];
    const std::string where =
        "stage " + std::to_string(i) + " (" + std::string(to_string(stage.op())) + "): ";
    need(stage.probability >= 0.0 && stage.probability <= 1.0,
         where + "probability must lie in [0,1]");
    std::visit(StageValidator{where}, stage.ranges);
  }
}

namespace detail {

Json config_to_json(const PipelineConfig& config) {
  Json doc;
  doc["version"] = config.version;
  Json stages = Json::array();
  for (const auto& stage : config.stages) {
    Json s;
    s["op"] = to_string(stage.op());
    s["probability"] = stage.probability;
    std::visit(RangesWriter{s}, stage.ranges);
    stages.push_back(std::move(s));
  }
  doc["stages"] = std::move(stages);
  return doc;
}

PipelineConfig config_from_json(const Json& doc) {
  need(doc.is_object(), "config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    need(key == "version" || key == "stages", "unknown top-level key '" + key + "'");
  }
  PipelineConfig config;
  const auto version = doc.find("version");
  need(version != doc.end() && version->is_number_integer(),
       "config needs an integer 'version'");
  config.version = version->get<int>();
  const auto stages = doc.find("stages");
  need(stages != doc.end() && stages->is_array(), "config needs a 'stages' array");

  for (std::size_t i = 0; i < stages->size(); ++i) {
    const Json& s = (*stages)[i];
    const std::string where = "stage " + std::to_string(i) + ": ";
    need(s.is_object(), where + "must be an object");
    const auto op_it = s.find("op");
    need(op_it != s.end() && op_it->is_string(), where + "needs a string 'op'");
    const auto name = op_it->get<std::string>();
    const auto op = parse_stage_op(name);
    need(op.has_value(), where + "unknown op '" + name + "'");
    const auto p_it = s.find("probability");
    need(p_it != s.end() && p_it->is_number(), where + "needs a numeric 'probability'");

    StageConfig stage = StageConfig::make(*op, p_it->get<double>());
    StageReader reader(s, where);
    std::visit(RangesReader{reader}, stage.ranges);
    reader.finish();
    config.stages.push_back(std::move(stage));
  }
  validate(config);
  return config;
}

}  // namespace detail

PipelineConfig parse_config(std::string_view text) {
  detail::Json doc;
  try {
    doc = detail::Json::parse(text.begin(), text.end());
  } catch (const detail::Json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return detail::config_from_json(doc);
}

PipelineConfig load_config(const std::string& path) {
  const auto bytes = read_file(path);
  try {
    return parse_config(std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                         bytes.size()));
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.message());
  }
}

std::string serialize_config(const PipelineConfig& config) {
  return detail::config_to_json(config).dump(2) + "\n";
}

}  // namespace leafforge
