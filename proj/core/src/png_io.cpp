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

#include "leafforge/png_io.hpp"

#include <png.h>
#include <zlib.h>

#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "leafforge/error.hpp"

namespace leafforge {

namespace {

// libpng reports errors by longjmp; everything that needs destruction lives
// outside the setjmp frames below.
struct ReadCursor {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t pos;
};

struct DecodeResult {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int channels = 0;
  ErrorCode error = ErrorCode::DecodeError;
  bool ok = false;
  char message[160] = {};
};

void read_from_cursor(png_structp png, png_bytep out, png_size_t length) {
  auto* cursor = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cursor->size - cursor->pos < length) {
    png_error(png, "unexpected end of data");
  }
  std::memcpy(out, cursor->data + cursor->pos, length);
  cursor->pos += length;
}

void on_png_error(png_structp png, png_const_charp msg) {
  auto* result = static_cast<DecodeResult*>(png_get_error_ptr(png));
  if (result != nullptr) {
    std::strncpy(result->message, msg, sizeof(result->message) - 1);
  }
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

// Two passes: the header pass fills `result` so the caller can size the
// buffer, the pixel pass decodes into it.
bool decode_header(ReadCursor cursor, DecodeResult* result) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, result, on_png_error,
                                           on_png_warning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, &cursor, read_from_cursor);
  png_read_info(png, info);

  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);
  result->width = png_get_image_width(png, info);
  result->height = png_get_image_height(png, info);

  if (bit_depth == 16) {
    result->error = ErrorCode::UnsupportedFormat;
    std::strncpy(result->message, "16-bit PNG is not supported", sizeof(result->message) - 1);
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  if (color_type == PNG_COLOR_TYPE_PALETTE && png_get_valid(png, info, PNG_INFO_tRNS)) {
    result->error = ErrorCode::UnsupportedFormat;
    std::strncpy(result->message, "palette PNG with transparency is not supported",
                 sizeof(result->message) - 1);
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  result->channels =
      (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) ? 1 : 3;
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

bool decode_pixels(ReadCursor cursor, DecodeResult* result, std::uint8_t* pixels) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, result, on_png_error,
                                           on_png_warning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, &cursor, read_from_cursor);
  png_read_info(png, info);

  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  const int passes = png_set_interlace_handling(png);
  png_read_update_info(png, info);

  const std::size_t stride =
      static_cast<std::size_t>(result->width) * static_cast<std::size_t>(result->channels);
  if (png_get_rowbytes(png, info) != stride) {
    std::strncpy(result->message, "unexpected row layout", sizeof(result->message) - 1);
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  for (int pass = 0; pass < passes; ++pass) {
    for (png_uint_32 y = 0; y < result->height; ++y) {
      png_read_row(png, pixels + y * stride, nullptr);
    }
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  result->ok = true;
  return true;
}

void append_to_vector(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void flush_noop(png_structp) {}

bool encode_rows(const Image* img, std::vector<std::uint8_t>* out, DecodeResult* status) {
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, status, on_png_error, on_png_warning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_set_write_fn(png, out, append_to_vector, flush_noop);
  png_set_compression_level(png, kPngCompressionLevel);
  png_set_compression_strategy(png, Z_RLE);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_UP);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img->width()),
               static_cast<png_uint_32>(img->height()), 8,
               img->channels() == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_BASE, PNG_FILTER_TYPE_BASE);
  png_write_info(png, info);
  for (int y = 0; y < img->height(); ++y) {
    png_write_row(png, const_cast<png_bytep>(img->row(y).data()));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  status->ok = true;
  return true;
}

}  // namespace

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::FileNotFound, "no such file: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw Error(ErrorCode::IoError,
                  "cannot create " + path.parent_path().string() + ": " + ec.message());
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

Image decode_png(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw Error(ErrorCode::DecodeError, "missing PNG signature");
  }
  const ReadCursor cursor{bytes.data(), bytes.size(), 0};
  DecodeResult header;
  if (!decode_header(cursor, &header)) {
    throw Error(header.error, header.message[0] ? header.message : "malformed PNG header");
  }
  if (header.width > (1u << 30) || header.height > (1u << 30)) {
    throw Error(ErrorCode::UnsupportedFormat, "image too large");
  }
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(header.width) * header.height *
                                   static_cast<std::size_t>(header.channels));
  DecodeResult body = header;
  body.message[0] = '\0';
  if (!decode_pixels(cursor, &body, pixels.data())) {
    throw Error(ErrorCode::DecodeError, body.message[0] ? body.message : "malformed PNG data");
  }
  return Image(static_cast<int>(header.width), static_cast<int>(header.height),
               header.channels, std::move(pixels));
}

Image load_png(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  try {
    return decode_png(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

std::vector<std::uint8_t> encode_png(const Image& img) {
  if (!is_valid(img)) throw Error(ErrorCode::InvalidDimension, "cannot encode an empty image");
  std::vector<std::uint8_t> out;
  out.reserve(img.size() / 2 + 128);
  DecodeResult status;
  if (!encode_rows(&img, &out, &status)) {
    throw Error(ErrorCode::IoError,
                std::string("PNG encode failed: ") +
                    (status.message[0] ? status.message : "unknown libpng error"));
  }
  return out;
}

void save_png(const Image& img, const std::filesystem::path& path) {
  write_file(path, encode_png(img));
}

}  // namespace leafforge
