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
 * @file dataset.hpp
 * @brief Few-shot seed sampling, augmentation fan-out and manifests.
 *
 * Input layout is root/<class>/<image>.png. A build picks `shots` seed images
 * per class, copies them as <stem>__seed.png and writes `reps` augmented
 * variants <stem>__rep<i>.png next to them. Everything written is listed in
 * out_dir/manifest.json together with the record needed to regenerate it and
 * the SHA-256 of its bytes. Non-seed source images are listed in
 * out_dir/validation.txt.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "leafforge/pipeline.hpp"

namespace leafforge {

inline constexpr int kManifestVersion = 1;
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kValidationFile = "validation.txt";

/// Seed / validation split for one class. Paths are relative to the dataset
/// root in generic form ("healthy/leaf_003.png"), sorted.
struct ClassSplit {
  std::string name;
  std::vector<std::string> seeds;
  std::vector<std::string> validation;
  friend bool operator==(const ClassSplit&, const ClassSplit&) = default;
};

/// Lists root/<class>/*.png in lexicographic order, shuffles with a seeded
/// Fisher-Yates pass and keeps the first `shots`. Throws MissingClass or
/// NotEnoughImages.
std::vector<ClassSplit> sample_seeds(const std::filesystem::path& root,
                                     const std::vector<std::string>& classes, int shots,
                                     std::uint64_t master_seed);

struct DatasetSpec {
  std::filesystem::path root;
  std::vector<std::string> classes;
  int shots_per_class = 5;
  int reps = 500;
  std::uint64_t master_seed = 0;
  PipelineConfig config = default_config();
  std::filesystem::path out_dir;
  unsigned threads = 0;  // 0 = hardware concurrency; output does not depend on it
};

struct SeedEntry {
  std::string output_path;  // relative to out_dir
  std::string class_name;
  std::string source_path;  // relative to root
  std::string content_hash;
  friend bool operator==(const SeedEntry&, const SeedEntry&) = default;
};

struct AugEntry {
  std::string output_path;
  std::string class_name;
  std::string source_path;
  SeedSpec seed_spec;
  AugRecord aug_record;
  std::string content_hash;
  friend bool operator==(const AugEntry&, const AugEntry&) = default;
};

struct Manifest {
  int version = kManifestVersion;
  std::string root;  // absolute, generic form
  std::vector<std::string> classes;
  int shots_per_class = 0;
  int reps = 0;
  std::uint64_t master_seed = 0;
  PipelineConfig config;
  std::vector<SeedEntry> seed_entries;  // sorted by output_path
  std::vector<AugEntry> entries;        // sorted by output_path

  std::size_t seed_count() const noexcept { return seed_entries.size(); }
  std::size_t augmented_count() const noexcept { return entries.size(); }
  std::size_t total_count() const noexcept { return seed_count() + augmented_count(); }

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

/// Builds the dataset. out_dir must be absent or empty (OutputNotEmpty
/// otherwise). On failure everything written is removed before rethrowing.
Manifest build_dataset(const DatasetSpec& spec);

std::string serialize_manifest(const Manifest& manifest);
Manifest parse_manifest(std::string_view text);

/// Accepts the manifest file or the directory holding it.
std::filesystem::path resolve_manifest_path(const std::filesystem::path& path);
Manifest load_manifest(const std::filesystem::path& path);

struct Mismatch {
  enum class Kind { Missing, HashMismatch, ReplayMismatch };
  Kind kind = Kind::HashMismatch;
  std::string output_path;
  std::string detail;
};

std::string_view to_string(Mismatch::Kind kind) noexcept;

struct VerifyReport {
  std::size_t checked = 0;
  std::size_t replayed = 0;
  std::vector<Mismatch> mismatches;  // sorted by output_path

  bool ok() const noexcept { return mismatches.empty(); }
};

struct VerifyOptions {
  bool replay = false;
  unsigned threads = 0;
};

/// Rehashes every listed file and, with `replay`, regenerates each output
/// from its source and record. Mismatches are reported, not thrown; a
/// missing manifest throws ManifestMissing.
VerifyReport verify_manifest(const std::filesystem::path& manifest_path,
                             const VerifyOptions& options = {});

}  // namespace leafforge
