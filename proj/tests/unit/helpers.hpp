// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "kseq/chromosome.hpp"

namespace testing {

inline std::filesystem::path temp_dir(const std::string& name) {
  const char* root = std::getenv("KSEQ_TEST_TMP");
  auto dir = std::filesystem::path(root ? root : std::filesystem::temp_directory_path().string() + "/kseq_test") / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Rectangle of foreground `value` inside a background-255 frame.
inline kseq::ChromosomeImage bar(int rows, int cols, int h, int w, int top, int left, std::uint8_t value = 100,
                                 int label = 0) {
  kseq::Raster px(rows, cols, 255);
  kseq::Mask m(rows, cols, 0);
  for (int r = top; r < top + h; ++r) {
    for (int c = left; c < left + w; ++c) {
      px(r, c) = value;
      m(r, c) = 1;
    }
  }
  return kseq::make_chromosome(px, m, label, "case", "bar");
}

}  // namespace testing
