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

#include "leafforge/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <string>

#include "codec.hpp"
#include "leafforge/error.hpp"
#include "leafforge/hash.hpp"
#include "leafforge/png_io.hpp"
#include "leafforge/random.hpp"
#include "parallel.hpp"

namespace fs = std::filesystem;

namespace leafforge {

namespace {

constexpr std::uint64_t kShuffleSalt = 0x5345454453504C54ULL;  // "SEEDSPLT"

bool is_png(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png";
}

std::string normalized_root(const fs::path& root) {
  fs::path p = fs::absolute(root).lexically_normal();
  if (!p.has_filename() && p.has_parent_path() && p != p.root_path()) p = p.parent_path();
  return p.generic_string();
}

std::string stem_of(const std::string& relative) {
  return fs::path(relative).stem().string();
}

void validate_spec(const DatasetSpec& spec) {
  if (spec.classes.empty()) throw Error(ErrorCode::ValidationError, "no classes selected");
  if (spec.shots_per_class < 1) {
    throw Error(ErrorCode::ValidationError, "shots per class must be at least 1");
  }
  if (spec.reps < 0) throw Error(ErrorCode::ValidationError, "reps must be non-negative");
  std::set<std::string> unique(spec.classes.begin(), spec.classes.end());
  if (unique.size() != spec.classes.size()) {
    throw Error(ErrorCode::ValidationError, "class list contains duplicates");
  }
  validate(spec.config);
}

void require_empty_output(const fs::path& out) {
  std::error_code ec;
  if (!fs::exists(out, ec)) return;
  if (!fs::is_directory(out, ec)) {
    throw Error(ErrorCode::OutputNotEmpty, out.string() + " exists and is not a directory");
  }
  if (fs::directory_iterator(out) != fs::directory_iterator()) {
    throw Error(ErrorCode::OutputNotEmpty, out.string() + " is not empty");
  }
}

// Removes what a failed build wrote, keeping a pre-existing empty out_dir.
void discard_output(const fs::path& out, bool created) {
  std::error_code ec;
  if (created) {
    fs::remove_all(out, ec);
    return;
  }
  for (const auto& child : fs::directory_iterator(out, ec)) fs::remove_all(child.path(), ec);
}

std::string write_png(const Image& img, const fs::path& path) {
  const auto bytes = encode_png(img);
  write_file(path, bytes);
  return sha256_hex(bytes);
}

// ---- manifest JSON -------------------------------------------------------

using detail::Json;

[[noreturn]] void bad_manifest(const std::string& msg) {
  throw Error(ErrorCode::ParseError, "malformed manifest: " + msg);
}

const Json& field(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) bad_manifest(std::string("missing '") + key + "'");
  return *it;
}

std::string text_field(const Json& obj, const char* key) {
  const Json& v = field(obj, key);
  if (!v.is_string()) bad_manifest(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

std::vector<ClassSplit> sample_seeds(const fs::path& root, const std::vector<std::string>& classes,
                                     int shots, std::uint64_t master_seed) {
  if (shots < 1) throw Error(ErrorCode::ValidationError, "shots must be at least 1");
  std::vector<ClassSplit> splits;
  for (const auto& name : classes) {
    const fs::path dir = root / name;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
      throw Error(ErrorCode::MissingClass, "class directory not found: " + dir.string());
    }
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && is_png(entry.path())) {
        files.push_back((fs::path(name) / entry.path().filename()).generic_string());
      }
    }
    std::sort(files.begin(), files.end());
    if (files.size() < static_cast<std::size_t>(shots)) {
      throw Error(ErrorCode::NotEnoughImages,
                  "class '" + name + "' has " + std::to_string(files.size()) +
                      " images, need " + std::to_string(shots));
    }

    RngStream rng(combine64(mix64(master_seed ^ kShuffleSalt), fnv1a64(name)));
    std::vector<std::string> order = files;
    for (std::size_t i = order.size(); i-- > 1;) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)));
      std::swap(order[i], order[j]);
    }
    ClassSplit split;
    split.name = name;
    split.seeds.assign(order.begin(), order.begin() + shots);
    split.validation.assign(order.begin() + shots, order.end());
    std::sort(split.seeds.begin(), split.seeds.end());
    std::sort(split.validation.begin(), split.validation.end());
    splits.push_back(std::move(split));
  }
  return splits;
}

Manifest build_dataset(const DatasetSpec& spec) {
  validate_spec(spec);
  require_empty_output(spec.out_dir);
  const auto splits = sample_seeds(spec.root, spec.classes, spec.shots_per_class,
                                   spec.master_seed);

  struct Source {
    std::string class_name;
    std::string relative;
    std::string stem;
    Image image;
  };
  std::vector<Source> sources;
  for (const auto& split : splits) {
    std::set<std::string> stems;
    for (const auto& rel : split.seeds) {
      const std::string stem = stem_of(rel);
      if (!stems.insert(stem).second) {
        throw Error(ErrorCode::ValidationError,
                    "two seed images in class '" + split.name + "' share the stem '" + stem + "'");
      }
      sources.push_back({split.name, rel, stem, load_png(spec.root / rel)});
    }
  }

  std::error_code ec;
  const bool created = !fs::exists(spec.out_dir, ec);
  fs::create_directories(spec.out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + spec.out_dir.string());

  Manifest manifest;
  manifest.root = normalized_root(spec.root);
  manifest.classes = spec.classes;
  manifest.shots_per_class = spec.shots_per_class;
  manifest.reps = spec.reps;
  manifest.master_seed = spec.master_seed;
  manifest.config = spec.config;

  try {
    for (const auto& src : sources) {
      SeedEntry e;
      e.output_path = src.class_name + "/" + src.stem + "__seed.png";
      e.class_name = src.class_name;
      e.source_path = src.relative;
      e.content_hash = write_png(src.image, spec.out_dir / e.output_path);
      manifest.seed_entries.push_back(std::move(e));
    }

    const auto reps = static_cast<std::size_t>(spec.reps);
    manifest.entries.resize(sources.size() * reps);
    detail::parallel_for(manifest.entries.size(), spec.threads, [&](std::size_t task) {
      const Source& src = sources[task / reps];
      const std::size_t rep = task % reps;
      AugEntry& e = manifest.entries[task];
      e.output_path = src.class_name + "/" + src.stem + "__rep" + std::to_string(rep) + ".png";
      e.class_name = src.class_name;
      e.source_path = src.relative;
      e.seed_spec = SeedSpec{spec.master_seed, src.relative, rep};
      AugResult result = augment(src.image, spec.config, e.seed_spec);
      e.content_hash = write_png(result.image, spec.out_dir / e.output_path);
      e.aug_record = std::move(result.record);
    });

    auto by_path = [](const auto& a, const auto& b) { return a.output_path < b.output_path; };
    std::sort(manifest.seed_entries.begin(), manifest.seed_entries.end(), by_path);
    std::sort(manifest.entries.begin(), manifest.entries.end(), by_path);

    std::string listing;
    for (const auto& split : splits) {
      for (const auto& rel : split.validation) listing += rel + "\n";
    }
    write_file(spec.out_dir / kValidationFile,
               std::span(reinterpret_cast<const std::uint8_t*>(listing.data()), listing.size()));
    const std::string text = serialize_manifest(manifest);
    write_file(spec.out_dir / kManifestFile,
               std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  } catch (...) {
    discard_output(spec.out_dir, created);
    throw;
  }
  return manifest;
}

std::string serialize_manifest(const Manifest& m) {
  Json doc;
  doc["format"] = "leafforge-manifest";
  doc["version"] = m.version;
  Json spec;
  spec["root"] = m.root;
  spec["classes"] = m.classes;
  spec["shots_per_class"] = m.shots_per_class;
  spec["reps"] = m.reps;
  spec["master_seed"] = m.master_seed;
  spec["config"] = detail::config_to_json(m.config);
  doc["spec"] = std::move(spec);

  Json counts;
  counts["seeds"] = m.seed_count();
  counts["augmented"] = m.augmented_count();
  counts["total"] = m.total_count();
  doc["counts"] = std::move(counts);
  doc["validation_listing"] = kValidationFile;

  Json seeds = Json::array();
  for (const auto& e : m.seed_entries) {
    Json j;
    j["output_path"] = e.output_path;
    j["class"] = e.class_name;
    j["source_path"] = e.source_path;
    j["content_hash"] = e.content_hash;
    seeds.push_back(std::move(j));
  }
  doc["seed_entries"] = std::move(seeds);

  Json entries = Json::array();
  for (const auto& e : m.entries) {
    Json j;
    j["output_path"] = e.output_path;
    j["class"] = e.class_name;
    j["source_path"] = e.source_path;
    j["seed_spec"] = detail::seed_to_json(e.seed_spec);
    j["aug_record"] = detail::record_to_json(e.aug_record);
    j["content_hash"] = e.content_hash;
    entries.push_back(std::move(j));
  }
  doc["entries"] = std::move(entries);
  return doc.dump(1) + "\n";
}

Manifest parse_manifest(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!doc.is_object() || text_field(doc, "format") != "leafforge-manifest") {
    bad_manifest("not a leafforge manifest");
  }
  Manifest m;
  const Json& version = field(doc, "version");
  if (!version.is_number_integer() || version.get<int>() != kManifestVersion) {
    bad_manifest("unsupported version");
  }
  const Json& spec = field(doc, "spec");
  m.root = text_field(spec, "root");
  for (const auto& c : field(spec, "classes")) m.classes.push_back(c.get<std::string>());
  m.shots_per_class = field(spec, "shots_per_class").get<int>();
  m.reps = field(spec, "reps").get<int>();
  m.master_seed = field(spec, "master_seed").get<std::uint64_t>();
  m.config = detail::config_from_json(field(spec, "config"));

  for (const auto& j : field(doc, "seed_entries")) {
    m.seed_entries.push_back({text_field(j, "output_path"), text_field(j, "class"),
                              text_field(j, "source_path"), text_field(j, "content_hash")});
  }
  for (const auto& j : field(doc, "entries")) {
    AugEntry e;
    e.output_path = text_field(j, "output_path");
    e.class_name = text_field(j, "class");
    e.source_path = text_field(j, "source_path");
    e.seed_spec = detail::seed_from_json(field(j, "seed_spec"));
    e.aug_record = detail::record_from_json(field(j, "aug_record"));
    e.content_hash = text_field(j, "content_hash");
    m.entries.push_back(std::move(e));
  }

  const Json& counts = field(doc, "counts");
  if (field(counts, "seeds").get<std::size_t>() != m.seed_count() ||
      field(counts, "augmented").get<std::size_t>() != m.augmented_count() ||
      field(counts, "total").get<std::size_t>() != m.total_count()) {
    bad_manifest("counts do not match the entry lists");
  }
  return m;
}

fs::path resolve_manifest_path(const fs::path& path) {
  std::error_code ec;
  if (fs::is_directory(path, ec)) return path / kManifestFile;
  return path;
}

Manifest load_manifest(const fs::path& path) {
  const fs::path file = resolve_manifest_path(path);
  std::error_code ec;
  if (!fs::is_regular_file(file, ec)) {
    throw Error(ErrorCode::ManifestMissing, "manifest not found: " + file.string());
  }
  const auto bytes = read_file(file);
  return parse_manifest(
      std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::string_view to_string(Mismatch::Kind kind) noexcept {
  switch (kind) {
    case Mismatch::Kind::Missing: return "missing";
    case Mismatch::Kind::HashMismatch: return "hash_mismatch";
    case Mismatch::Kind::ReplayMismatch: return "replay_mismatch";
  }
  return "unknown";
}

VerifyReport verify_manifest(const fs::path& manifest_path, const VerifyOptions& options) {
  const fs::path file = resolve_manifest_path(manifest_path);
  const Manifest m = load_manifest(file);
  const fs::path base = file.parent_path();

  // One task per listed file; seeds first, then augmented entries.
  struct Task {
    const std::string* output_path;
    const std::string* source_path;
    const std::string* content_hash;
    const AugEntry* aug;  // null for seed copies
  };
  std::vector<Task> tasks;
  for (const auto& e : m.seed_entries) {
    tasks.push_back({&e.output_path, &e.source_path, &e.content_hash, nullptr});
  }
  for (const auto& e : m.entries) {
    tasks.push_back({&e.output_path, &e.source_path, &e.content_hash, &e});
  }

  std::map<std::string, Image> sources;
  std::map<std::string, std::string> source_errors;
  if (options.replay) {
    for (const auto& t : tasks) {
      if (sources.count(*t.source_path) || source_errors.count(*t.source_path)) continue;
      try {
        sources.emplace(*t.source_path, load_png(fs::path(m.root) / *t.source_path));
      } catch (const Error& e) {
        source_errors.emplace(*t.source_path, e.message());
      }
    }
  }

  std::vector<std::vector<Mismatch>> found(tasks.size());
  detail::parallel_for(tasks.size(), options.threads, [&](std::size_t i) {
    const Task& t = tasks[i];
    auto report = [&](Mismatch::Kind kind, std::string detail) {
      found[i].push_back({kind, *t.output_path, std::move(detail)});
    };
    try {
      const auto bytes = read_file(base / *t.output_path);
      const auto actual = sha256_hex(bytes);
      if (actual != *t.content_hash) {
        report(Mismatch::Kind::HashMismatch, "expected " + *t.content_hash + ", found " + actual);
      }
    } catch (const Error& e) {
      report(Mismatch::Kind::Missing, e.message());
    }
    if (!options.replay) return;

    const auto src = sources.find(*t.source_path);
    if (src == sources.end()) {
      const auto err = source_errors.find(*t.source_path);
      report(Mismatch::Kind::ReplayMismatch,
             "source unavailable: " + (err == source_errors.end() ? "" : err->second));
      return;
    }
    try {
      if (t.aug != nullptr && !(t.aug->aug_record.seed == t.aug->seed_spec)) {
        report(Mismatch::Kind::ReplayMismatch, "record seed differs from entry seed_spec");
        return;
      }
      const Image replayed =
          t.aug == nullptr ? src->second : apply_plan(src->second, t.aug->aug_record);
      const auto hash = sha256_hex(encode_png(replayed));
      if (hash != *t.content_hash) {
        report(Mismatch::Kind::ReplayMismatch,
               "replay produced " + hash + ", manifest lists " + *t.content_hash);
      }
    } catch (const Error& e) {
      report(Mismatch::Kind::ReplayMismatch, e.message());
    }
  });

  VerifyReport out;
  out.checked = tasks.size();
  out.replayed = options.replay ? tasks.size() : 0;
  for (auto& list : found) {
    for (auto& mm : list) out.mismatches.push_back(std::move(mm));
  }
  std::stable_sort(out.mismatches.begin(), out.mismatches.end(),
                   [](const Mismatch& a, const Mismatch& b) { return a.output_path < b.output_path; });
  return out;
}

}  // namespace leafforge
