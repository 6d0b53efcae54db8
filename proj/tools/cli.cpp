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

#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <optional>
#include <string_view>

#include <CLI11.hpp>
#include <json.hpp>

#include "leafforge/dataset.hpp"
#include "leafforge/error.hpp"
#include "leafforge/hash.hpp"
#include "leafforge/pipeline.hpp"
#include "leafforge/png_io.hpp"

namespace leafforge::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// LEAFFORGE_LOG=error|warn|info|debug. Unknown values fall back to warn.
LogLevel log_level_from_env() {
  const char* raw = std::getenv("LEAFFORGE_LOG");
  if (raw == nullptr) return LogLevel::Warn;
  const std::string_view v(raw);
  if (v == "error") return LogLevel::Error;
  if (v == "info") return LogLevel::Info;
  if (v == "debug") return LogLevel::Debug;
  return LogLevel::Warn;
}

class Log {
 public:
  Log(std::ostream& err, LogLevel level) : err_(err), level_(level) {}

  void info(const std::string& msg) const { emit(LogLevel::Info, "info", msg); }
  void debug(const std::string& msg) const { emit(LogLevel::Debug, "debug", msg); }
  void error(const std::string& msg) const { emit(LogLevel::Error, "error", msg); }

 private:
  void emit(LogLevel at, const char* tag, const std::string& msg) const {
    if (at <= level_) err_ << "leafforge: " << tag << ": " << msg << '\n';
  }

  std::ostream& err_;
  LogLevel level_;
};

PipelineConfig config_or_default(const std::optional<std::string>& path, const Log& log) {
  if (!path) {
    log.debug("using default pipeline config");
    return default_config();
  }
  log.debug("loading config " + *path);
  return load_config(*path);
}

struct AugmentArgs {
  std::string input;
  std::optional<std::string> config;
  std::uint64_t seed = 0;
  std::uint32_t rep = 0;
  std::string output;
  std::optional<std::string> emit_record;
  bool json = false;
};

int cmd_augment(const AugmentArgs& a, std::ostream& out, const Log& log) {
  const PipelineConfig config = config_or_default(a.config, log);
  const Image img = load_png(a.input);
  const SeedSpec seed{a.seed, a.input, a.rep};
  const AugResult result = augment(img, config, seed);

  const std::vector<std::uint8_t> bytes = encode_png(result.image);
  write_file(a.output, bytes);
  const std::string record_text = serialize_record(result.record);
  if (a.emit_record) {
    const std::string text = record_text + "\n";
    write_file(*a.emit_record, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                         text.size()));
  }

  std::size_t fired = 0;
  for (const StageRecord& s : result.record.stages) fired += s.fired ? 1 : 0;
  const std::string hash = sha256_hex(bytes);
  if (a.json) {
    Json j;
    j["output"] = a.output;
    j["content_hash"] = hash;
    j["stages"] = result.record.stages.size();
    j["fired"] = fired;
    j["record"] = Json::parse(record_text);
    out << j.dump() << '\n';
  } else {
    out << "wrote " << a.output << " (" << fired << " of " << result.record.stages.size()
        << " stages fired, sha256 " << hash << ")\n";
  }
  return kExitOk;
}

struct BuildArgs {
  std::string root;
  std::vector<std::string> classes;
  int shots = 5;
  int reps = 500;
  std::uint64_t seed = 0;
  std::optional<std::string> config;
  std::string out;
  unsigned threads = 0;
  bool json = false;
};

int cmd_build(const BuildArgs& a, std::ostream& out, const Log& log) {
  DatasetSpec spec;
  spec.root = a.root;
  spec.classes = a.classes;
  spec.shots_per_class = a.shots;
  spec.reps = a.reps;
  spec.master_seed = a.seed;
  spec.config = config_or_default(a.config, log);
  spec.out_dir = a.out;
  spec.threads = a.threads;

  log.info("building " + std::to_string(a.classes.size()) + " classes into " + a.out);
  const auto start = std::chrono::steady_clock::now();
  const Manifest m = build_dataset(spec);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  log.info("build took " + std::to_string(seconds) + " s");

  if (a.json) {
    Json j;
    j["out_dir"] = a.out;
    j["manifest"] = (fs::path(a.out) / kManifestFile).generic_string();
    j["seeds"] = m.seed_count();
    j["augmented"] = m.augmented_count();
    j["total"] = m.total_count();
    out << j.dump() << '\n';
  } else {
    out << "built " << m.total_count() << " files (" << m.seed_count() << " seeds, "
        << m.augmented_count() << " augmented) in " << a.out << '\n';
  }
  return kExitOk;
}

struct VerifyArgs {
  std::string manifest;
  bool replay = false;
  unsigned threads = 0;
  bool json = false;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out, const Log& log) {
  log.info("verifying " + a.manifest + (a.replay ? " with replay" : ""));
  const VerifyReport r = verify_manifest(a.manifest, {a.replay, a.threads});
  if (a.json) {
    Json j;
    j["ok"] = r.ok();
    j["checked"] = r.checked;
    j["replayed"] = r.replayed;
    Json list = Json::array();
    for (const Mismatch& m : r.mismatches) {
      list.push_back(
          {{"kind", to_string(m.kind)}, {"output_path", m.output_path}, {"detail", m.detail}});
    }
    j["mismatches"] = std::move(list);
    out << j.dump() << '\n';
  } else {
    for (const Mismatch& m : r.mismatches) {
      out << to_string(m.kind) << ' ' << m.output_path;
      if (!m.detail.empty()) out << ": " << m.detail;
      out << '\n';
    }
    out << (r.ok() ? "OK" : "FAILED") << ": " << r.checked << " files checked, " << r.replayed
        << " replayed, " << r.mismatches.size() << " mismatches\n";
  }
  return r.ok() ? kExitOk : kExitMismatch;
}

int cmd_show_config(const std::optional<std::string>& config, std::ostream& out,
                    const Log& log) {
  out << serialize_config(config_or_default(config, log));
  return kExitOk;
}

struct StatsArgs {
  std::optional<std::string> config;
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  bool json = false;
};

int cmd_stats(const StatsArgs& a, std::ostream& out, const Log& log) {
  const PipelineConfig config = config_or_default(a.config, log);
  const PlanStats stats = compute_plan_stats(config, a.samples, a.seed);
  if (a.json) {
    Json j;
    j["samples"] = stats.samples;
    j["seed"] = a.seed;
    Json stages = Json::array();
    for (const StageStats& s : stats.stages) {
      Json params = Json::array();
      for (const ParamSummary& p : s.params) {
        params.push_back({{"name", p.name},
                          {"count", p.count},
                          {"min", p.min},
                          {"max", p.max},
                          {"mean", p.mean}});
      }
      stages.push_back({{"op", to_string(s.op)},
                        {"probability", s.probability},
                        {"fired", s.fired},
                        {"rate", s.rate},
                        {"params", std::move(params)}});
    }
    j["stages"] = std::move(stages);
    out << j.dump() << '\n';
    return kExitOk;
  }

  out << stats.samples << " plans, seed " << a.seed << '\n';
  out << std::fixed;
  for (const StageStats& s : stats.stages) {
    out << std::left << std::setw(20) << to_string(s.op) << std::right << " p=" << std::setprecision(3)
        << s.probability << " fired=" << s.fired << " rate=" << std::setprecision(4) << s.rate
        << '\n';
    for (const ParamSummary& p : s.params) {
      out << "    " << std::left << std::setw(16) << p.name << std::right
          << std::setprecision(4) << " min=" << p.min << " max=" << p.max
          << " mean=" << p.mean << '\n';
    }
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const Log log(err, log_level_from_env());

  CLI::App app{"Deterministic leaf image augmentation and few-shot dataset builder",
               "leafforge"};
  app.require_subcommand(1);
  app.fallthrough(false);

  std::function<int()> action;

  AugmentArgs aug;
  CLI::App* augment_cmd = app.add_subcommand("augment", "Augment a single image");
  augment_cmd->add_option("--input", aug.input, "Input PNG")->required();
  augment_cmd->add_option("--config", aug.config, "Pipeline config (JSON)");
  augment_cmd->add_option("--seed", aug.seed, "Master seed");
  augment_cmd->add_option("--rep", aug.rep, "Repetition index");
  augment_cmd->add_option("--output", aug.output, "Output PNG")->required();
  augment_cmd->add_option("--emit-record", aug.emit_record, "Write the augmentation record here");
  augment_cmd->add_flag("--json", aug.json, "Machine-readable summary");
  augment_cmd->callback([&] { action = [&] { return cmd_augment(aug, out, log); }; });

  BuildArgs build;
  CLI::App* build_cmd = app.add_subcommand("build", "Build a few-shot augmented dataset");
  build_cmd->add_option("--root", build.root, "Dataset root (root/<class>/*.png)")->required();
  build_cmd->add_option("--classes", build.classes, "Comma-separated class names")
      ->required()
      ->delimiter(',');
  build_cmd->add_option("--shots", build.shots, "Seed images per class")->capture_default_str();
  build_cmd->add_option("--reps", build.reps, "Augmented copies per seed")->capture_default_str();
  build_cmd->add_option("--seed", build.seed, "Master seed");
  build_cmd->add_option("--config", build.config, "Pipeline config (JSON)");
  build_cmd->add_option("--out", build.out, "Output directory (absent or empty)")->required();
  build_cmd->add_option("--threads", build.threads, "Worker cap, 0 = all cores");
  build_cmd->add_flag("--json", build.json, "Machine-readable summary");
  build_cmd->callback([&] { action = [&] { return cmd_build(build, out, log); }; });

  VerifyArgs verify;
  CLI::App* verify_cmd = app.add_subcommand("verify", "Check a built dataset against its manifest");
  verify_cmd->add_option("--manifest", verify.manifest, "manifest.json or its directory")
      ->required();
  verify_cmd->add_flag("--replay", verify.replay, "Regenerate every output from its record");
  verify_cmd->add_option("--threads", verify.threads, "Worker cap, 0 = all cores");
  verify_cmd->add_flag("--json", verify.json, "Machine-readable report");
  verify_cmd->callback([&] { action = [&] { return cmd_verify(verify, out, log); }; });

  std::optional<std::string> show_path;
  CLI::App* show_cmd = app.add_subcommand("show-config", "Print a config in canonical form");
  show_cmd->add_option("--config", show_path, "Pipeline config (JSON); default if omitted");
  show_cmd->callback([&] { action = [&] { return cmd_show_config(show_path, out, log); }; });

  StatsArgs stats;
  CLI::App* stats_cmd = app.add_subcommand("stats", "Fire rates and parameter ranges of sampled plans");
  stats_cmd->add_option("--config", stats.config, "Pipeline config (JSON)");
  stats_cmd->add_option("--samples", stats.samples, "Number of plans")->capture_default_str();
  stats_cmd->add_option("--seed", stats.seed, "Master seed");
  stats_cmd->add_flag("--json", stats.json, "Machine-readable output");
  stats_cmd->callback([&] { action = [&] { return cmd_stats(stats, out, log); }; });

  std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    return action();
  } catch (const Error& e) {
    log.error(e.what());
    return kExitError;
  } catch (const std::exception& e) {
    log.error(e.what());
    return kExitError;
  }
}

}  // namespace leafforge::cli
