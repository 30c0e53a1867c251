// SPDX-License-Identifier: Apache-2.0
#include "kseq/raster_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "kseq/error.hpp"

namespace kseq {
namespace {

std::vector<unsigned char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io.unreadable", "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Raster decode_pgm(const std::vector<unsigned char>& bytes, const std::filesystem::path& path) {
  std::size_t pos = 2;
  auto next_token = [&]() -> long {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    long value = 0;
    std::size_t digits = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      value = value * 10 + (bytes[pos] - '0');
      ++pos;
      ++digits;
      if (value > (1L << 24)) break;
    }
    if (digits == 0) throw Error("io.malformed", "bad PGM header in " + path.string());
    return value;
  };
  const long cols = next_token();
  const long rows = next_token();
  const long maxval = next_token();
  if (maxval != 255) throw Error("io.unsupported", "only 8-bit PGM supported: " + path.string());
  if (rows < 1 || cols < 1) throw Error("io.malformed", "empty PGM " + path.string());
  ++pos;  // single whitespace byte before the raster
  const std::size_t need = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  if (bytes.size() < pos + need) throw Error("io.malformed", "truncated PGM " + path.string());
  Raster out(static_cast<int>(rows), static_cast<int>(cols));
  std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(pos), need, out.data().begin());
  return out;
}

Raster decode_png(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw Error("io.malformed", "cannot decode PNG " + path.string() + ": " + image.message);
  }
  if ((image.format & PNG_FORMAT_FLAG_COLOR) != 0) {
    png_image_free(&image);
    throw Error("io.unsupported", "expected grayscale PNG: " + path.string());
  }
  image.format = PNG_FORMAT_GRAY;
  Raster out(static_cast<int>(image.height), static_cast<int>(image.width));
  if (!png_image_finish_read(&image, nullptr, out.data().data(), 0, nullptr)) {
    throw Error("io.malformed", "cannot decode PNG " + path.string() + ": " + image.message);
  }
  return out;
}

}  // namespace

RasterFormat format_for_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".pgm" ? RasterFormat::pgm : RasterFormat::png;
}

Raster read_raster(const std::filesystem::path& path) {
  auto bytes = slurp(path);
  static constexpr std::array<unsigned char, 8> kPngMagic{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::equal(kPngMagic.begin(), kPngMagic.end(), bytes.begin())) {
    return decode_png(path);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return decode_pgm(bytes, path);
  throw Error("io.unsupported", "not a PNG or binary PGM: " + path.string());
}

void write_raster(const std::filesystem::path& path, const Raster& raster, RasterFormat format) {
  if (format == RasterFormat::pgm) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io.unwritable", "cannot write " + path.string());
    out << "P5\n" << raster.cols() << ' ' << raster.rows() << "\n255\n";
    out.write(reinterpret_cast<const char*>(raster.data().data()),
              static_cast<std::streamsize>(raster.size()));
    if (!out) throw Error("io.unwritable", "cannot write " + path.string());
    return;
  }
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(raster.cols());
  image.height = static_cast<png_uint_32>(raster.rows());
  image.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, raster.data().data(), 0, nullptr)) {
    throw Error("io.unwritable", "cannot write PNG " + path.string() + ": " + image.message);
  }
}

void write_raster(const std::filesystem::path& path, const Raster& raster) {
  write_raster(path, raster, format_for_path(path));
}

void write_png_rgb(const std::filesystem::path& path, const RgbImage& rgb) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(rgb.cols);
  image.height = static_cast<png_uint_32>(rgb.rows);
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.c_str(), 0, rgb.data.data(), 0, nullptr)) {
    throw Error("io.unwritable", "cannot write PNG " + path.string() + ": " + image.message);
  }
}

}  // namespace kseq
