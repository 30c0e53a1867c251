// SPDX-License-Identifier: Apache-2.0
#include "kseq/features.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "kseq/error.hpp"

namespace kseq {

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t dim)
    : dim_(dim), values_(rows * dim, 0.0), patch_refs_(rows) {
  for (std::size_t i = 0; i < rows; ++i) patch_refs_[i] = static_cast<int>(i);
}

FeatureMatrix::FeatureMatrix(std::size_t dim, std::vector<double> values, std::vector<int> patch_refs)
    : dim_(dim), values_(std::move(values)), patch_refs_(std::move(patch_refs)) {
  if (dim_ == 0 || values_.size() % dim_ != 0 || values_.size() / dim_ != patch_refs_.size()) {
    throw Error("features.bad_shape", "feature values do not form an N x D matrix");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error("features.non_finite", "feature matrix contains non-finite values");
  }
}

void FeatureMatrix::append(const FeatureMatrix& other) {
  if (other.rows() == 0) return;
  if (dim_ == 0) dim_ = other.dim_;
  if (other.dim_ != dim_) throw Error("features.dimension_mismatch", "cannot stack features of different dims");
  values_.insert(values_.end(), other.values_.begin(), other.values_.end());
  patch_refs_.insert(patch_refs_.end(), other.patch_refs_.begin(), other.patch_refs_.end());
}

PatchGrid extract_patches(const ChromosomeImage& img, int patch_size, double fg_min) {
  if (patch_size < 2) throw Error("features.bad_patch_size", "patch size must be at least 2");
  if (!(fg_min >= 0.0 && fg_min <= 1.0)) throw Error("features.bad_fg_min", "fg_min must lie in [0, 1]");
  PatchGrid grid;
  grid.patch_size = patch_size;
  grid.source_rows = img.mask.rows();
  grid.source_cols = img.mask.cols();
  grid.grid_rows = (grid.source_rows + patch_size - 1) / patch_size;
  grid.grid_cols = (grid.source_cols + patch_size - 1) / patch_size;
  const double area = static_cast<double>(patch_size) * patch_size;
  const double half = (patch_size - 1) / 2.0;
  for (int gr = 0; gr < grid.grid_rows; ++gr) {
    for (int gc = 0; gc < grid.grid_cols; ++gc) {
      int fg = 0;
      for (int r = gr * patch_size; r < (gr + 1) * patch_size; ++r)
        for (int c = gc * patch_size; c < (gc + 1) * patch_size; ++c) fg += img.mask.at_or(r, c, 0) != 0;
      const double frac = fg / area;
      if (fg == 0 || frac < fg_min) continue;
      grid.patches.push_back({{gr * patch_size + half, gc * patch_size + half}, frac, gr, gc});
    }
  }
  if (grid.patches.empty()) throw Error("features.no_patches", "no patch reaches the foreground threshold");
  return grid;
}

FeatureMatrix banding_features(const ChromosomeImage& img, const PatchGrid& grid, int bins) {
  if (bins < 1 || bins > 256) throw Error("features.bad_bins", "histogram bins must be in 1..256");
  const std::size_t dim = static_cast<std::size_t>(bins) + 3;
  FeatureMatrix out(grid.patches.size(), dim);
  const int p = grid.patch_size;
  std::vector<double> hist(static_cast<std::size_t>(bins));
  for (std::size_t i = 0; i < grid.patches.size(); ++i) {
    const auto& patch = grid.patches[i];
    std::fill(hist.begin(), hist.end(), 0.0);
    double sum = 0.0, sum_sq = 0.0;
    int n = 0;
    for (int r = patch.grid_row * p; r < (patch.grid_row + 1) * p; ++r) {
      for (int c = patch.grid_col * p; c < (patch.grid_col + 1) * p; ++c) {
        if (!img.mask.at_or(r, c, 0)) continue;
        const int v = img.pixels(r, c);
        hist[static_cast<std::size_t>(v * bins / 256)] += 1.0;
        sum += v;
        sum_sq += static_cast<double>(v) * v;
        ++n;
      }
    }
    auto row = out.row(i);
    for (int b = 0; b < bins; ++b) row[static_cast<std::size_t>(b)] = hist[static_cast<std::size_t>(b)] / n;
    const double mean = sum / n;
    const double var = std::max(0.0, sum_sq / n - mean * mean);
    row[static_cast<std::size_t>(bins)] = mean / 255.0;
    row[static_cast<std::size_t>(bins) + 1] = std::sqrt(var) / 255.0;
    row[static_cast<std::size_t>(bins) + 2] = patch.foreground_fraction;
  }
  return out;
}

FeatureMatrix import_embeddings(const std::filesystem::path& path, const PatchGrid& grid) {
  std::ifstream in(path);
  if (!in) throw Error("io.unreadable", "cannot open embedding file " + path.string());
  std::string magic, version;
  long n = -1, d = -1;
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  if (!(hs >> magic >> version >> n >> d) || magic != "KSEMB" || version != "v1" || n < 0 || d < 1) {
    throw Error("features.bad_header", "malformed embedding header in " + path.string());
  }
  if (static_cast<std::size_t>(n) != grid.patches.size()) {
    throw Error("features.row_mismatch", "embedding file has " + std::to_string(n) + " rows but grid has " +
                                             std::to_string(grid.patches.size()) + " patches");
  }
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n * d));
  std::string line;
  long rows_read = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const char* ptr = line.data();
    const char* end = line.data() + line.size();
    long cols = 0;
    while (true) {
      while (ptr < end && (*ptr == ' ' || *ptr == '\t' || *ptr == '\r')) ++ptr;
      if (ptr >= end) break;
      double v = 0.0;
      auto [next, ec] = std::from_chars(ptr, end, v);
      if (ec != std::errc{}) throw Error("features.bad_value", "unparsable value in " + path.string());
      if (!std::isfinite(v)) throw Error("features.non_finite", "non-finite embedding value in " + path.string());
      values.push_back(v);
      ptr = next;
      ++cols;
    }
    if (cols != d) throw Error("features.bad_row", "embedding row has wrong number of values");
    ++rows_read;
  }
  if (rows_read != n) {
    throw Error("features.row_mismatch", "embedding file declares " + std::to_string(n) + " rows but holds " +
                                             std::to_string(rows_read));
  }
  std::vector<int> refs(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < refs.size(); ++i) refs[i] = static_cast<int>(i);
  return FeatureMatrix(static_cast<std::size_t>(d), std::move(values), std::move(refs));
}

void export_embeddings(const std::filesystem::path& path, const FeatureMatrix& features) {
  std::ofstream out(path);
  if (!out) throw Error("io.unwritable", "cannot write " + path.string());
  out << "KSEMB v1 " << features.rows() << ' ' << features.dim() << '\n';
  std::array<char, 64> buf{};
  for (std::size_t i = 0; i < features.rows(); ++i) {
    auto row = features.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), row[j]);
      if (j) out << ' ';
      out.write(buf.data(), p - buf.data());
    }
    out << '\n';
  }
}

}  // namespace kseq
