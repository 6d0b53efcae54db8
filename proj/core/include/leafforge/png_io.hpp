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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "leafforge/image.hpp"

namespace leafforge {

/// Encoder settings used for every write: zlib level 1 with the run-length
/// strategy and the Up row filter. Changing any of them changes every content
/// hash.
inline constexpr int kPngCompressionLevel = 1;

/// Reads an 8-bit gray or RGB PNG. Alpha is dropped, low bit-depth gray is
/// widened to 8 bits, palettes are expanded to RGB. 16-bit files and
/// palettes carrying transparency are rejected with UnsupportedFormat.
Image load_png(const std::filesystem::path& path);
Image decode_png(std::span<const std::uint8_t> bytes);

/// Encodes with fixed settings (no time chunk, fixed zlib level and filter)
/// so equal images always produce equal bytes.
std::vector<std::uint8_t> encode_png(const Image& img);

/// Writes encode_png(img), creating the parent directory when missing.
void save_png(const Image& img, const std::filesystem::path& path);

void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

}  // namespace leafforge
