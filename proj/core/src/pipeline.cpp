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

#include "leafforge/pipeline.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <string>

#include "codec.hpp"
#include "leafforge/error.hpp"
#include "leafforge/superpixel.hpp"

namespace leafforge {

namespace {

constexpr std::uint64_t kSeedSalt = 0x4C45414646524745ULL;  // "LEAFFRGE"

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

// Draw order inside each sampler is part of the reproducibility contract.
struct Sampler {
  RngStream& rng;

  double draw(const Range& r) const { return rng.uniform(r.lo, r.hi); }

  StageParams operator()(const HFlipRanges&) const { return HFlipParams{}; }
  StageParams operator()(const VFlipRanges&) const { return VFlipParams{}; }
  StageParams operator()(const AffineRanges& r) const {
    AffineParams p;
    p.scale_x = draw(r.scale_x);
    p.scale_y = draw(r.scale_y);
    p.translate_x = draw(r.translate_x);
    p.translate_y = draw(r.translate_y);
    p.rotate = draw(r.rotate);
    p.shear = draw(r.shear);
    return p;
  }
  StageParams operator()(const SuperpixelRanges& r) const {
    SuperpixelParams p;
    p.segments = static_cast<int>(rng.uniform_int(r.segments.lo, r.segments.hi));
    p.p_replace = draw(r.p_replace);
    p.compactness = r.compactness;
    p.iterations = r.iterations;
    return p;
  }
  StageParams operator()(const BlurRanges& r) const {
    const auto pick = rng.uniform_int(0, static_cast<std::int64_t>(r.methods.size()) - 1);
    BlurSpec spec;
    spec.method = r.methods[static_cast<std::size_t>(pick)];
    if (spec.method == BlurMethod::Gaussian) {
      spec.sigma = draw(r.sigma);
    } else {
      const auto steps = (r.kernel.hi - r.kernel.lo) / 2;
      spec.kernel = static_cast<int>(r.kernel.lo + 2 * rng.uniform_int(0, steps));
    }
    return spec;
  }
  StageParams operator()(const SharpenEmbossRanges& r) const {
    SharpenEmbossParams p;
    p.emboss = rng.bernoulli(0.5);
    if (p.emboss) {
      p.alpha = draw(r.emboss_alpha);
      p.amount = draw(r.strength);
    } else {
      p.alpha = draw(r.sharpen_alpha);
      p.amount = draw(r.lightness);
    }
    return p;
  }
  StageParams operator()(const OverlayRanges& r) const { return OverlayParams{draw(r.alpha)}; }
  StageParams operator()(const NoiseRanges& r) const {
    NoiseSpec spec;
    spec.sigma = draw(r.sigma);
    spec.per_channel = rng.bernoulli(r.per_channel_probability);
    return spec;
  }
  StageParams operator()(const DropoutRanges& r) const {
    DropoutSpec spec;
    spec.fraction = draw(r.fraction);
    spec.patch_frac = draw(r.patch_frac);
    return spec;
  }
  StageParams operator()(const BrightnessContrastRanges& r) const {
    BrightnessContrastParams p;
    p.add = draw(r.add);
    p.mul = draw(r.mul);
    return p;
  }
  StageParams operator()(const ElasticRanges& r) const {
    DistortGrid grid;
    grid.rows = r.rows;
    grid.cols = r.cols;
    grid.jitter_sigma = draw(r.jitter);
    return grid;
  }
  StageParams operator()(const ChannelShiftRanges& r) const {
    ChannelShiftParams p;
    for (auto& o : p.offsets) o = static_cast<int>(rng.uniform_int(r.offset.lo, r.offset.hi));
    return p;
  }
};

Image apply_stage(const Image& img, const StageParams& params, const SeedSpec& seed,
                  std::size_t stage_index) {
  RngStream rng(stream_seed(seed, stage_index, StreamPurpose::Apply));
  return std::visit(
      Overloaded{
          [&](const HFlipParams&) { return flip_horizontal(img); },
          [&](const VFlipParams&) { return flip_vertical(img); },
          [&](const AffineParams& p) {
            return affine(img, p, Interp::Bilinear, BorderMode::reflect());
          },
          [&](const SuperpixelParams& p) {
            const auto pixels = static_cast<long long>(img.pixel_count());
            const int n = static_cast<int>(std::min<long long>(p.segments, pixels));
            const SegmentMap seg = slic_segment(img, n, p.compactness, p.iterations);
            return superpixel_replace(img, seg, p.p_replace, rng);
          },
          [&](const BlurSpec& spec) { return blur(img, spec); },
          [&](const SharpenEmbossParams& p) {
            return p.emboss ? emboss(img, p.alpha, p.amount) : sharpen(img, p.alpha, p.amount);
          },
          [&](const OverlayParams& p) { return grayscale_overlay(img, p.alpha); },
          [&](const NoiseSpec& spec) { return add_gaussian_noise(img, spec, rng); },
          [&](const DropoutSpec& spec) { return coarse_dropout(img, spec, rng); },
          [&](const BrightnessContrastParams& p) {
            return brightness_contrast(img, p.add, p.mul);
          },
          [&](const DistortGrid& grid) { return elastic_distort(img, grid, rng); },
          [&](const ChannelShiftParams& p) { return channel_shift(img, p.offsets); },
      },
      params);
}

}  // namespace

std::uint64_t stream_seed(const SeedSpec& seed, std::size_t stage_index,
                          StreamPurpose purpose) noexcept {
  std::uint64_t k = mix64(seed.master_seed ^ kSeedSalt);
  k = combine64(k, fnv1a64(seed.image_id));
  k = combine64(k, seed.rep_index);
  k = combine64(k, static_cast<std::uint64_t>(stage_index));
  k = combine64(k, static_cast<std::uint64_t>(purpose));
  return k;
}

AugPlan sample_plan(const PipelineConfig& config, const SeedSpec& seed) {
  AugPlan plan;
  plan.seed = seed;
  plan.stages.reserve(config.stages.size());
  for (std::size_t i = 0; i < config.stages.size(); ++i) {
    const StageConfig& stage = config.stages[i];
    RngStream rng(stream_seed(seed, i, StreamPurpose::Sample));
    StageRecord rec;
    rec.op = stage.op();
    rec.fired = rng.bernoulli(stage.probability);
    if (rec.fired) rec.params = std::visit(Sampler{rng}, stage.ranges);
    plan.stages.push_back(std::move(rec));
  }
  return plan;
}

Image apply_plan(const Image& img, const AugPlan& plan) {
  Image current = img;
  for (std::size_t i = 0; i < plan.stages.size(); ++i) {
    const StageRecord& rec = plan.stages[i];
    if (!rec.fired) continue;
    if (!rec.params || rec.params->index() != static_cast<std::size_t>(rec.op)) {
      throw Error(ErrorCode::ValidationError,
                  "stage " + std::to_string(i) + " fired without matching parameters");
    }
    current = apply_stage(current, *rec.params, plan.seed, i);
  }
  return current;
}

AugResult augment(const Image& img, const PipelineConfig& config, const SeedSpec& seed) {
  AugResult result;
  result.record = sample_plan(config, seed);
  result.image = apply_plan(img, result.record);
  return result;
}

std::vector<std::pair<std::string, double>> param_values(const StageParams& params) {
  using Values = std::vector<std::pair<std::string, double>>;
  return std::visit(
      Overloaded{
          [](const HFlipParams&) { return Values{}; },
          [](const VFlipParams&) { return Values{}; },
          [](const AffineParams& p) {
            return Values{{"scale_x", p.scale_x},         {"scale_y", p.scale_y},
                          {"translate_x", p.translate_x}, {"translate_y", p.translate_y},
                          {"rotate", p.rotate},           {"shear", p.shear}};
          },
          [](const SuperpixelParams& p) {
            return Values{{"segments", p.segments}, {"p_replace", p.p_replace}};
          },
          [](const BlurSpec& s) {
            Values v{{"method", static_cast<double>(s.method)}};
            if (s.method == BlurMethod::Gaussian) {
              v.emplace_back("sigma", s.sigma);
            } else {
              v.emplace_back("kernel", s.kernel);
            }
            return v;
          },
          [](const SharpenEmbossParams& p) {
            return p.emboss ? Values{{"emboss", 1.0}, {"emboss_alpha", p.alpha},
                                     {"strength", p.amount}}
                            : Values{{"emboss", 0.0}, {"sharpen_alpha", p.alpha},
                                     {"lightness", p.amount}};
          },
          [](const OverlayParams& p) { return Values{{"alpha", p.alpha}}; },
          [](const NoiseSpec& s) {
            return Values{{"sigma", s.sigma}, {"per_channel", s.per_channel ? 1.0 : 0.0}};
          },
          [](const DropoutSpec& s) {
            return Values{{"fraction", s.fraction}, {"patch_frac", s.patch_frac}};
          },
          [](const BrightnessContrastParams& p) {
            return Values{{"add", p.add}, {"mul", p.mul}};
          },
          [](const DistortGrid& g) { return Values{{"jitter", g.jitter_sigma}}; },
          [](const ChannelShiftParams& p) {
            return Values{{"offset_r", p.offsets[0]},
                          {"offset_g", p.offsets[1]},
                          {"offset_b", p.offsets[2]}};
          },
      },
      params);
}

PlanStats compute_plan_stats(const PipelineConfig& config, std::size_t samples,
                             std::uint64_t master_seed, const std::string& image_id) {
  if (samples == 0) throw Error(ErrorCode::ValidationError, "sample count must be positive");
  validate(config);

  PlanStats stats;
  stats.samples = samples;
  struct Acc {
    std::size_t count = 0;
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
  };
  std::vector<std::vector<std::pair<std::string, Acc>>> accs(config.stages.size());
  for (std::size_t i = 0; i < config.stages.size(); ++i) {
    stats.stages.push_back({config.stages[i].op(), config.stages[i].probability, 0, 0.0, {}});
  }

  for (std::size_t n = 0; n < samples; ++n) {
    const AugPlan plan = sample_plan(config, SeedSpec{master_seed, image_id, n});
    for (std::size_t i = 0; i < plan.stages.size(); ++i) {
      const auto& rec = plan.stages[i];
      if (!rec.fired) continue;
      ++stats.stages[i].fired;
      for (const auto& [name, value] : param_values(*rec.params)) {
        auto& list = accs[i];
        auto it = std::find_if(list.begin(), list.end(),
                               [&](const auto& e) { return e.first == name; });
        if (it == list.end()) {
          list.emplace_back(name, Acc{});
          it = std::prev(list.end());
        }
        Acc& a = it->second;
        ++a.count;
        a.min = std::min(a.min, value);
        a.max = std::max(a.max, value);
        a.sum += value;
      }
    }
  }

  for (std::size_t i = 0; i < stats.stages.size(); ++i) {
    auto& s = stats.stages[i];
    s.rate = static_cast<double>(s.fired) / static_cast<double>(samples);
    for (const auto& [name, a] : accs[i]) {
      s.params.push_back({name, a.count, a.min, a.max, a.sum / static_cast<double>(a.count)});
    }
  }
  return stats;
}

// ---- record JSON ---------------------------------------------------------

namespace detail {

namespace {

constexpr std::array<std::string_view, 3> kBlurNames{"gaussian", "average", "median"};

[[noreturn]] void bad_record(const std::string& msg) {
  throw Error(ErrorCode::ValidationError, "malformed record: " + msg);
}

double num(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) bad_record(std::string("missing number '") + key + "'");
  return it->get<double>();
}

int integer(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number_integer()) {
    bad_record(std::string("missing integer '") + key + "'");
  }
  return it->get<int>();
}

bool boolean(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_boolean()) bad_record(std::string("missing bool '") + key + "'");
  return it->get<bool>();
}

Json params_to_json(const StageParams& params) {
  return std::visit(
      Overloaded{
          [](const HFlipParams&) { return Json::object(); },
          [](const VFlipParams&) { return Json::object(); },
          [](const AffineParams& p) {
            Json j;
            j["scale_x"] = p.scale_x;
            j["scale_y"] = p.scale_y;
            j["translate_x"] = p.translate_x;
            j["translate_y"] = p.translate_y;
            j["rotate"] = p.rotate;
            j["shear"] = p.shear;
            return j;
          },
          [](const SuperpixelParams& p) {
            Json j;
            j["segments"] = p.segments;
            j["p_replace"] = p.p_replace;
            j["compactness"] = p.compactness;
            j["iterations"] = p.iterations;
            return j;
          },
          [](const BlurSpec& s) {
            Json j;
            j["method"] = kBlurNames[static_cast<std::size_t>(s.method)];
            if (s.method == BlurMethod::Gaussian) {
              j["sigma"] = s.sigma;
            } else {
              j["kernel"] = s.kernel;
            }
            return j;
          },
          [](const SharpenEmbossParams& p) {
            Json j;
            j["mode"] = p.emboss ? "emboss" : "sharpen";
            j["alpha"] = p.alpha;
            j[p.emboss ? "strength" : "lightness"] = p.amount;
            return j;
          },
          [](const OverlayParams& p) {
            Json j;
            j["alpha"] = p.alpha;
            return j;
          },
          [](const NoiseSpec& s) {
            Json j;
            j["sigma"] = s.sigma;
            j["per_channel"] = s.per_channel;
            return j;
          },
          [](const DropoutSpec& s) {
            Json j;
            j["fraction"] = s.fraction;
            j["patch_frac"] = s.patch_frac;
            return j;
          },
          [](const BrightnessContrastParams& p) {
            Json j;
            j["add"] = p.add;
            j["mul"] = p.mul;
            return j;
          },
          [](const DistortGrid& g) {
            Json j;
            j["rows"] = g.rows;
            j["cols"] = g.cols;
            j["jitter_sigma"] = g.jitter_sigma;
            return j;
          },
          [](const ChannelShiftParams& p) {
            Json j;
            j["offsets"] = Json::array({p.offsets[0], p.offsets[1], p.offsets[2]});
            return j;
          },
      },
      params);
}

StageParams params_from_json(StageOp op, const Json& j) {
  if (!j.is_object()) bad_record("params must be an object");
  switch (op) {
    case StageOp::HFlip: return HFlipParams{};
    case StageOp::VFlip: return VFlipParams{};
    case StageOp::Affine:
      return AffineParams{num(j, "scale_x"),     num(j, "scale_y"), num(j, "translate_x"),
                          num(j, "translate_y"), num(j, "rotate"),  num(j, "shear")};
    case StageOp::Superpixel:
      return SuperpixelParams{integer(j, "segments"), num(j, "p_replace"),
                              num(j, "compactness"), integer(j, "iterations")};
    case StageOp::Blur: {
      const auto it = j.find("method");
      if (it == j.end() || !it->is_string()) bad_record("blur needs a method");
      const auto name = it->get<std::string>();
      const auto m = std::find(kBlurNames.begin(), kBlurNames.end(), name);
      if (m == kBlurNames.end()) bad_record("unknown blur method '" + name + "'");
      BlurSpec spec;
      spec.method = static_cast<BlurMethod>(m - kBlurNames.begin());
      if (spec.method == BlurMethod::Gaussian) {
        spec.sigma = num(j, "sigma");
      } else {
        spec.kernel = integer(j, "kernel");
      }
      return spec;
    }
    case StageOp::SharpenOrEmboss: {
      const auto it = j.find("mode");
      if (it == j.end() || !it->is_string()) bad_record("sharpen_or_emboss needs a mode");
      const bool emboss = it->get<std::string>() == "emboss";
      if (!emboss && it->get<std::string>() != "sharpen") bad_record("unknown mode");
      return SharpenEmbossParams{emboss, num(j, "alpha"),
                                 num(j, emboss ? "strength" : "lightness")};
    }
    case StageOp::GrayscaleOverlay: return OverlayParams{num(j, "alpha")};
    case StageOp::GaussianNoise: return NoiseSpec{num(j, "sigma"), boolean(j, "per_channel")};
    case StageOp::Dropout: return DropoutSpec{num(j, "fraction"), num(j, "patch_frac")};
    case StageOp::BrightnessContrast:
      return BrightnessContrastParams{num(j, "add"), num(j, "mul")};
    case StageOp::Elastic:
      return DistortGrid{integer(j, "rows"), integer(j, "cols"), num(j, "jitter_sigma")};
    case StageOp::ChannelShift: {
      const auto it = j.find("offsets");
      if (it == j.end() || !it->is_array() || it->size() != 3) {
        bad_record("channel_shift needs three offsets");
      }
      ChannelShiftParams p;
      for (std::size_t c = 0; c < 3; ++c) {
        if (!(*it)[c].is_number_integer()) bad_record("offsets must be integers");
        p.offsets[c] = (*it)[c].get<int>();
      }
      return p;
    }
  }
  bad_record("unknown op");
}

}  // namespace

Json seed_to_json(const SeedSpec& seed) {
  Json j;
  j["master_seed"] = seed.master_seed;
  j["image_id"] = seed.image_id;
  j["rep_index"] = seed.rep_index;
  return j;
}

SeedSpec seed_from_json(const Json& j) {
  if (!j.is_object()) bad_record("seed must be an object");
  const auto ms = j.find("master_seed");
  const auto id = j.find("image_id");
  const auto rep = j.find("rep_index");
  if (ms == j.end() || !ms->is_number_unsigned() || id == j.end() || !id->is_string() ||
      rep == j.end() || !rep->is_number_unsigned()) {
    bad_record("seed needs master_seed, image_id and rep_index");
  }
  return SeedSpec{ms->get<std::uint64_t>(), id->get<std::string>(), rep->get<std::uint64_t>()};
}

Json record_to_json(const AugRecord& record) {
  Json j;
  j["seed"] = seed_to_json(record.seed);
  Json stages = Json::array();
  for (const auto& rec : record.stages) {
    Json s;
    s["op"] = to_string(rec.op);
    s["fired"] = rec.fired;
    if (rec.fired && rec.params) s["params"] = params_to_json(*rec.params);
    stages.push_back(std::move(s));
  }
  j["stages"] = std::move(stages);
  return j;
}

AugRecord record_from_json(const Json& j) {
  if (!j.is_object()) bad_record("record must be an object");
  AugRecord record;
  const auto seed = j.find("seed");
  if (seed == j.end()) bad_record("missing seed");
  record.seed = seed_from_json(*seed);
  const auto stages = j.find("stages");
  if (stages == j.end() || !stages->is_array()) bad_record("missing stages");
  for (const auto& s : *stages) {
    if (!s.is_object()) bad_record("stage must be an object");
    const auto op_it = s.find("op");
    if (op_it == s.end() || !op_it->is_string()) bad_record("stage needs an op");
    const auto op = parse_stage_op(op_it->get<std::string>());
    if (!op) bad_record("unknown op '" + op_it->get<std::string>() + "'");
    StageRecord rec;
    rec.op = *op;
    rec.fired = boolean(s, "fired");
    if (rec.fired) {
      const auto p = s.find("params");
      if (p == s.end()) bad_record("fired stage without params");
      rec.params = params_from_json(*op, *p);
    }
    record.stages.push_back(std::move(rec));
  }
  return record;
}

}  // namespace detail

std::string serialize_record(const AugRecord& record) {
  return detail::record_to_json(record).dump();
}

AugRecord parse_record(std::string_view text) {
  detail::Json doc;
  try {
    doc = detail::Json::parse(text.begin(), text.end());
  } catch (const detail::Json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return detail::record_from_json(doc);
}

}  // namespace leafforge
