// Copyright 2026 The TrustSR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "trustsr/image_io.h"

#include <png.h>

#include <cmath>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "trustsr/error.h"

namespace trustsr {
namespace {

struct PngRaw {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<std::uint8_t> pixels;
  std::vector<png_bytep> rows;
  char message[256] = {0};
};

struct MemoryReader {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t pos;
};

void ReadFromMemory(png_structp png, png_bytep out, png_size_t count) {
  auto* reader = static_cast<MemoryReader*>(png_get_io_ptr(png));
  if (reader->pos + count > reader->size) {
    png_error(png, "truncated PNG stream");
  }
  std::memcpy(out, reader->data + reader->pos, count);
  reader->pos += count;
}

void StoreMessage(png_structp png, png_const_charp msg) {
  auto* raw = static_cast<PngRaw*>(png_get_error_ptr(png));
  std::snprintf(raw->message, sizeof(raw->message), "%s", msg);
  png_longjmp(png, 1);
}

void IgnoreWarning(png_structp, png_const_charp) {}

// No objects with non-trivial destructors live in this frame; libpng
// reports errors through longjmp.
bool DecodePngRaw(MemoryReader* reader, PngRaw* raw) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, raw,
                                           StoreMessage, IgnoreWarning);
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
  png_set_read_fn(png, reader, ReadFromMemory);
  png_read_info(png, info);
  const int color_type = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) {
    png_set_palette_to_rgb(png);
  } else if (depth != 8 && depth != 16) {
    std::snprintf(raw->message, sizeof(raw->message),
                  "unsupported PNG bit depth %d", depth);
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  raw->width = png_get_image_width(png, info);
  raw->height = png_get_image_height(png, info);
  raw->channels = png_get_channels(png, info);
  raw->bit_depth = png_get_bit_depth(png, info);
  const png_size_t stride = png_get_rowbytes(png, info);
  raw->pixels.resize(stride * raw->height);
  raw->rows.resize(raw->height);
  for (png_uint_32 y = 0; y < raw->height; ++y) {
    raw->rows[y] = raw->pixels.data() + y * stride;
  }
  png_read_image(png, raw->rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

Image DecodePng(const std::vector<std::uint8_t>& bytes) {
  MemoryReader reader{bytes.data(), bytes.size(), 0};
  PngRaw raw;
  if (!DecodePngRaw(&reader, &raw)) {
    throw Error(ErrorCode::kFormatError,
                std::string("cannot decode PNG: ") + raw.message);
  }
  if (raw.channels != 1 && raw.channels != 3) {
    throw Error(ErrorCode::kFormatError,
                "unsupported PNG channel count " +
                    std::to_string(raw.channels));
  }
  const std::size_t count =
      static_cast<std::size_t>(raw.width) * raw.height * raw.channels;
  std::vector<double> data(count);
  if (raw.bit_depth == 16) {
    for (std::size_t i = 0; i < count; ++i) {
      const unsigned v = (raw.pixels[2 * i] << 8) | raw.pixels[2 * i + 1];
      data[i] = v / 65535.0;
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) data[i] = raw.pixels[i] / 255.0;
  }
  return Image(static_cast<int>(raw.width), static_cast<int>(raw.height),
               raw.channels, std::move(data));
}

// Binary PGM (P5) / PPM (P6) with maxval up to 65535.
Image DecodePnm(const std::vector<std::uint8_t>& bytes) {
  std::size_t pos = 2;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&] {
    skip_space();
    long value = 0;
    bool any = false;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      value = value * 10 + (bytes[pos] - '0');
      if (value > 1'000'000) break;
      any = true;
      ++pos;
    }
    if (!any) throw Error(ErrorCode::kFormatError, "malformed PNM header");
    return value;
  };
  const int channels = bytes[1] == '5' ? 1 : 3;
  const long width = read_int();
  const long height = read_int();
  const long maxval = read_int();
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) {
    throw Error(ErrorCode::kFormatError, "unsupported PNM header values");
  }
  ++pos;  // single whitespace before raster
  const int sample_bytes = maxval > 255 ? 2 : 1;
  const std::size_t count =
      static_cast<std::size_t>(width) * height * channels;
  if (bytes.size() < pos + count * sample_bytes) {
    throw Error(ErrorCode::kFormatError, "truncated PNM raster");
  }
  std::vector<double> data(count);
  for (std::size_t i = 0; i < count; ++i) {
    unsigned v = bytes[pos + i * sample_bytes];
    if (sample_bytes == 2) v = (v << 8) | bytes[pos + 2 * i + 1];
    data[i] = static_cast<double>(v) / static_cast<double>(maxval);
  }
  return Image(static_cast<int>(width), static_cast<int>(height), channels,
               std::move(data));
}

unsigned Quantize(double v, unsigned max) {
  return static_cast<unsigned>(std::lround(v * max));
}

void WriteToVector(png_structp png, png_bytep data, png_size_t count) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + count);
}

void FlushNothing(png_structp) {}

bool EncodePngRaw(PngRaw* raw, std::vector<std::uint8_t>* out) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, raw,
                                            StoreMessage, IgnoreWarning);
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
  png_set_write_fn(png, out, WriteToVector, FlushNothing);
  png_set_IHDR(png, info, raw->width, raw->height, raw->bit_depth,
               raw->channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, raw->rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

std::vector<std::uint8_t> EncodePnm(const Image& img, int bit_depth) {
  const unsigned max = bit_depth == 16 ? 65535 : 255;
  std::ostringstream header;
  header << (img.channels() == 1 ? "P5" : "P6") << "\n"
         << img.width() << " " << img.height() << "\n"
         << max << "\n";
  const std::string h = header.str();
  std::vector<std::uint8_t> out(h.begin(), h.end());
  for (double v : img.data()) {
    const unsigned q = Quantize(v, max);
    if (bit_depth == 16) out.push_back(static_cast<std::uint8_t>(q >> 8));
    out.push_back(static_cast<std::uint8_t>(q & 0xff));
  }
  return out;
}

void CheckBitDepth(int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) {
    throw Error(ErrorCode::kFormatError,
                "unsupported output bit depth " + std::to_string(bit_depth));
  }
}

}  // namespace

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIoError, "read failed: " + path.string());
  return bytes;
}

void WriteFileBytes(const std::filesystem::path& path,
                    const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

Image DecodeImage(const std::vector<std::uint8_t>& bytes) {
  static constexpr std::uint8_t kPngMagic[8] = {0x89, 'P',  'N',  'G',
                                                0x0d, 0x0a, 0x1a, 0x0a};
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngMagic, 8) == 0) {
    return DecodePng(bytes);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' &&
      (bytes[1] == '5' || bytes[1] == '6')) {
    return DecodePnm(bytes);
  }
  throw Error(ErrorCode::kFormatError, "unrecognized image format");
}

Image LoadImage(const std::filesystem::path& path) {
  try {
    return DecodeImage(ReadFileBytes(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kFormatError) {
      throw Error(e.code(), path.string() + ": " + e.what());
    }
    throw;
  }
}

std::vector<std::uint8_t> EncodePng(const Image& img, int bit_depth) {
  CheckBitDepth(bit_depth);
  if (img.empty()) throw Error(ErrorCode::kEmptyInput, "cannot encode empty image");
  PngRaw raw;
  raw.width = static_cast<png_uint_32>(img.width());
  raw.height = static_cast<png_uint_32>(img.height());
  raw.channels = img.channels();
  raw.bit_depth = bit_depth;
  const std::size_t bytes_per_sample = bit_depth / 8;
  const std::size_t stride =
      static_cast<std::size_t>(img.width()) * img.channels() * bytes_per_sample;
  raw.pixels.resize(stride * img.height());
  const unsigned max = bit_depth == 16 ? 65535 : 255;
  auto data = img.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const unsigned q = Quantize(data[i], max);
    if (bit_depth == 16) {
      raw.pixels[2 * i] = static_cast<std::uint8_t>(q >> 8);
      raw.pixels[2 * i + 1] = static_cast<std::uint8_t>(q & 0xff);
    } else {
      raw.pixels[i] = static_cast<std::uint8_t>(q);
    }
  }
  raw.rows.resize(raw.height);
  for (png_uint_32 y = 0; y < raw.height; ++y) {
    raw.rows[y] = raw.pixels.data() + y * stride;
  }
  std::vector<std::uint8_t> out;
  if (!EncodePngRaw(&raw, &out)) {
    throw Error(ErrorCode::kFormatError,
                std::string("cannot encode PNG: ") + raw.message);
  }
  return out;
}

void SaveImage(const std::filesystem::path& path, const Image& img,
               int bit_depth) {
  CheckBitDepth(bit_depth);
  const std::string ext = path.extension().string();
  if (ext == ".pgm" || ext == ".ppm") {
    WriteFileBytes(path, EncodePnm(img, bit_depth));
  } else {
    WriteFileBytes(path, EncodePng(img, bit_depth));
  }
}

}  // namespace trustsr
