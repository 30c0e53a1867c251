// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kseq/chromosome.hpp"
#include "kseq/raster_io.hpp"
#include "kseq/rng.hpp"

namespace kseq {

/// Palette of band intensities; level k sits at the centre of histogram
/// bin k of the default 8-bin banding features.
inline constexpr int kPaletteSize = 8;
constexpr int palette_intensity(int level) { return 16 + 32 * level; }
/// Inverse of palette_intensity (nearest level).
int palette_level(int intensity);

struct Band {
  int intensity = 0;  // 0..255
  double length_fraction = 0.0;
  friend bool operator==(const Band&, const Band&) = default;
};

struct BandProgram {
  int class_label = 0;
  std::vector<Band> bands;
  int base_width = 12;
  int base_length = 100;
  double curvature = 1.0;  // largest bend angle in radians

  std::vector<int> levels() const;
};

/// The 24 per-class programs. Class 0 bands are palette levels (2, 0, 1, 2).
const std::vector<BandProgram>& standard_programs();

void validate_program(const BandProgram& program);

enum class MutationKind { band_insertion, band_deletion, band_inversion };

std::string to_string(MutationKind kind);

struct Mutation {
  MutationKind kind = MutationKind::band_insertion;
  int site = 0;  // insertion: new band index; deletion: removed index; inversion: first index
  std::optional<Band> payload;
  int span = 1;  // inversion length
};

/// Insertion scales existing fractions by (1 - payload fraction); deletion
/// renormalizes the rest; inversion reverses bands [site, site + span).
BandProgram mutate(const BandProgram& program, const Mutation& mutation);

/// A structural change drawn at random that keeps adjacent bands distinct and
/// changes the orientation-independent band sequence.
Mutation random_mutation(const BandProgram& program, Rng& rng);

struct NoiseSpec {
  double intensity_sigma = 0.0;
  double length_jitter = 0.0;
  double bend_prob = 0.0;
};

nlohmann::json to_json(const Mutation& m);

struct GroundTruth {
  std::vector<int> band_levels;  // palette levels, start tip first
  std::optional<Mutation> mutation;
  std::array<PixelPos, 2> tips{};
  int base_class = 0;
};

struct SynthChromosome {
  ChromosomeImage image;
  GroundTruth truth;
};

/// Renders a rounded bar (bent once when bend_prob fires) whose bands are laid
/// out along its centreline. Image dims are multiples of 8.
SynthChromosome generate_chromosome(const BandProgram& program, std::uint64_t seed, const NoiseSpec& noise,
                                    std::string case_id = "case", std::string instance_id = "chr");

struct DatasetSpec {
  int cases_male = 32;
  int cases_female = 33;
  std::uint64_t seed = 7;
  NoiseSpec noise{8.0, 0.1, 0.2};
  double abnormal_fraction = 0.0;
};

struct SynthDataset {
  std::vector<CaseRecord> cases;
  std::vector<SynthChromosome> instances;
};

struct PlannedInstance {
  std::size_t case_index = 0;
  int class_label = 0;
  std::string instance_id;
};

struct DatasetPlan {
  std::vector<CaseRecord> cases;
  std::vector<PlannedInstance> instances;
};

/// Case and instance bookkeeping without rendering: males first, each case
/// holding two copies of every autosome plus XX or XY.
DatasetPlan plan_dataset(const DatasetSpec& spec);

/// 46 chromosomes per case (XX or XY). round(abnormal_fraction * total)
/// instances carry one random mutation.
SynthDataset generate_dataset(const DatasetSpec& spec);

/// Writes images (+ masks), manifest.json and ground_truth.json under `dir`.
/// Returns the manifest path.
std::filesystem::path write_dataset(const SynthDataset& data, const std::filesystem::path& dir,
                                    RasterFormat format, const nlohmann::json& stamp = nlohmann::json::object());

}  // namespace kseq
