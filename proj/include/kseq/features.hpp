// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "kseq/chromosome.hpp"

namespace kseq {

struct Patch {
  Point2 center;
  double foreground_fraction = 0.0;
  int grid_row = 0;
  int grid_col = 0;
};

/// Retained cells of a stride-P tiling anchored at (0, 0). Cells running
/// past the image edge count the missing pixels as background.
struct PatchGrid {
  int patch_size = 8;
  int source_rows = 0;
  int source_cols = 0;
  int grid_rows = 0;
  int grid_cols = 0;
  std::vector<Patch> patches;
};

/// N x D row-major matrix of finite reals.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t dim);
  FeatureMatrix(std::size_t dim, std::vector<double> values, std::vector<int> patch_refs);

  std::size_t rows() const noexcept { return dim_ == 0 ? 0 : values_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }

  std::span<const double> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }
  std::span<double> row(std::size_t i) { return {values_.data() + i * dim_, dim_}; }

  std::span<const double> values() const noexcept { return values_; }
  const std::vector<int>& patch_refs() const noexcept { return patch_refs_; }

  void append(const FeatureMatrix& other);

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> values_;
  std::vector<int> patch_refs_;
};

inline constexpr int kDefaultHistogramBins = 8;

PatchGrid extract_patches(const ChromosomeImage& img, int patch_size, double fg_min);

/// Per patch: B-bin normalized histogram of foreground intensities, then
/// mean/255, standard deviation/255 and foreground fraction (B + 3 dims).
FeatureMatrix banding_features(const ChromosomeImage& img, const PatchGrid& grid,
                               int bins = kDefaultHistogramBins);

/// Reads a "KSEMB v1 N D" embedding file; N must match the retained patches.
FeatureMatrix import_embeddings(const std::filesystem::path& path, const PatchGrid& grid);

/// Writes values with shortest round-trip formatting, so import reproduces
/// every bit.
void export_embeddings(const std::filesystem::path& path, const FeatureMatrix& features);

}  // namespace kseq
