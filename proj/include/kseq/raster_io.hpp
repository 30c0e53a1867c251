// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "kseq/grid.hpp"

namespace kseq {

enum class RasterFormat { png, pgm };

/// Interleaved 8-bit RGB image.
struct RgbImage {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> data;

  RgbImage() = default;
  RgbImage(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c * 3, 0) {}

  void set(int r, int c, std::uint8_t red, std::uint8_t green, std::uint8_t blue) {
    auto* p = &data[(static_cast<std::size_t>(r) * cols + c) * 3];
    p[0] = red;
    p[1] = green;
    p[2] = blue;
  }
};

/// Reads an 8-bit grayscale PNG or binary PGM (P5); the format is detected
/// from the file signature.
Raster read_raster(const std::filesystem::path& path);

void write_raster(const std::filesystem::path& path, const Raster& raster, RasterFormat format);

/// Format chosen from the extension (".pgm" -> PGM, anything else -> PNG).
void write_raster(const std::filesystem::path& path, const Raster& raster);

void write_png_rgb(const std::filesystem::path& path, const RgbImage& image);

RasterFormat format_for_path(const std::filesystem::path& path);

}  // namespace kseq
