// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kseq/grid.hpp"

namespace kseq {

inline constexpr int kNumClasses = 24;
inline constexpr int kClassX = 22;
inline constexpr int kClassY = 23;
inline constexpr int kNormalChromosomeCount = 46;

/// One cropped chromosome instance. Construct through make_chromosome() so
/// the invariants are checked.
struct ChromosomeImage {
  Raster pixels;
  Mask mask;
  std::optional<int> class_label;
  std::string case_id;
  std::string instance_id;
};

/// Validates dimensions, label range and non-empty foreground.
ChromosomeImage make_chromosome(Raster pixels, Mask mask, std::optional<int> class_label,
                                std::string case_id, std::string instance_id);

/// Background is exactly intensity 255; everything darker is foreground.
Mask threshold_mask(const Raster& pixels);

/// Loads a raster and its mask. Without a mask path the mask is derived by
/// thresholding. Mask files mark foreground with any nonzero value.
ChromosomeImage load_chromosome(const std::filesystem::path& image_path,
                                const std::optional<std::filesystem::path>& mask_path,
                                std::optional<int> class_label, std::string case_id = {},
                                std::string instance_id = {});

/// Writes the raster and, when given, the mask (foreground stored as 255).
void save_chromosome(const ChromosomeImage& image, const std::filesystem::path& image_path,
                     const std::optional<std::filesystem::path>& mask_path);

enum class Sex { male, female };

struct CaseRecord {
  std::string case_id;
  Sex sex = Sex::female;
  std::vector<std::string> chromosomes;  // instance ids
  int expected_count = kNormalChromosomeCount;
};

struct DatasetSplit {
  std::set<std::string> train_ids;
  std::set<std::string> test_ids;
  std::pair<int, int> ratio{90, 10};
};

/// Per-class stratified split. Pure in (set of (instance_id, label), ratio,
/// seed); input order does not matter.
DatasetSplit stratified_split(std::span<const ChromosomeImage> dataset, std::pair<int, int> ratio,
                              std::uint64_t seed);

/// Same, on bare (instance_id, label) pairs.
DatasetSplit stratified_split(std::span<const std::pair<std::string, int>> labeled,
                              std::pair<int, int> ratio, std::uint64_t seed);

struct ManifestEntry {
  std::filesystem::path image_path;
  std::optional<std::filesystem::path> mask_path;
  std::optional<int> class_label;
  std::string case_id;
  std::string instance_id;  // defaults to the image file stem
};

/// Reads the JSON manifest; relative paths resolve against the manifest's
/// directory.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

/// Writes paths relative to the manifest directory when possible.
void write_manifest(const std::filesystem::path& path, std::span<const ManifestEntry> entries);

ChromosomeImage load_entry(const ManifestEntry& entry);

}  // namespace kseq
