// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kseq/analysis.hpp"
#include "kseq/chromosome.hpp"
#include "kseq/clustering.hpp"
#include "kseq/raster_io.hpp"
#include "kseq/rng.hpp"
#include "kseq/seqmine.hpp"
#include "kseq/tokenizer.hpp"

namespace kseq {

inline constexpr const char* kToolVersion = KSEQ_VERSION;
inline constexpr int kFormatVersion = 1;

struct PipelineConfig {
  int patch_size = 8;
  double fg_min = 0.3;
  int histogram_bins = kDefaultHistogramBins;
  int K = 8;
  int K_over = 24;
  int max_iters = kDefaultMaxIters;
  double lambda = 0.25;
  int max_sweeps = kDefaultMaxSweeps;
  int min_run = 1;
  int d_pe = 16;
  int ngram_order = 2;
  double ngram_alpha = 1.0;
  double min_support = 0.5;
  int pattern_max_len = kDefaultPatternMaxLen;
  double threshold = 0.0;
  std::pair<int, int> split_ratio{90, 10};
  std::uint64_t seed = 7;
  LinearHyperParams linear;
  // When set, patch features are read from <dir>/<instance_id>.ksemb
  // instead of the built-in extractor.
  std::string embeddings_dir;

  TokenizerParams tokenizer() const;
  std::uint64_t stage_seed(const std::string& stage) const { return derive_seed(seed, stage); }
};

nlohmann::json config_to_json(const PipelineConfig& cfg);
/// Keys present in `j` override `base`; unknown keys are rejected.
PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig base = {});
/// 16 hex digits, stable across runs and platforms.
std::string config_hash(const PipelineConfig& cfg);
/// {tool_version, config_hash, seed}
nlohmann::json stamp(const PipelineConfig& cfg);

nlohmann::json model_to_json(const ClusterModel& model);
ClusterModel model_from_json(const nlohmann::json& j);
nlohmann::json bank_to_json(const PatternBank& bank);
PatternBank bank_from_json(const nlohmann::json& j);
nlohmann::json ngram_to_json(const NGramModel& model);
NGramModel ngram_from_json(const nlohmann::json& j);
nlohmann::json linear_to_json(const LinearClassifier& clf);
LinearClassifier linear_from_json(const nlohmann::json& j);

nlohmann::json load_json(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline. Doubles use shortest round-trip
/// formatting, so a reload is bit-exact.
void save_json(const std::filesystem::path& path, const nlohmann::json& j);

/// "# tool_version=... config_hash=... seed=..." plus newline; heads every
/// CSV and token dump.
std::string stamp_line(const PipelineConfig& cfg);
/// Stamp line, then one format_token_line per sequence.
std::string tokens_text(std::span<const TokenSequence> seqs, const PipelineConfig& cfg);
void write_tokens(const std::filesystem::path& path, std::span<const TokenSequence> seqs, const PipelineConfig& cfg);
std::vector<TokenSequence> read_tokens(const std::filesystem::path& path);

/// Loads every manifest entry (in parallel, order preserved).
std::vector<ChromosomeImage> load_images(std::span<const ManifestEntry> entries);

/// All retained patch features of `images`, stacked in input order.
FeatureMatrix stack_features(std::span<const ChromosomeImage* const> images, const PipelineConfig& cfg);

/// Patch features of one image (built-in or imported per the config).
FeatureMatrix image_features(const ChromosomeImage& img, const PatchGrid& grid, const PipelineConfig& cfg);

/// Global vocabulary: k-means with K_over clusters, merged to K and ordered
/// by mean intensity.
ClusterModel fit_vocabulary(std::span<const ChromosomeImage* const> images, const PipelineConfig& cfg);

std::vector<Tokenization> tokenize_all(std::span<const ChromosomeImage* const> images, const ClusterModel& model,
                                       const PipelineConfig& cfg);

/// Pooled linear-head inputs; labels taken from the images.
Dataset pooled_dataset(std::span<const Tokenization> tokens, std::span<const ChromosomeImage* const> images,
                       const ClusterModel& model, const PipelineConfig& cfg);


struct ExperimentResult {
  ClusterModel model;
  PatternBank bank;
  NGramModel ngram;
  LinearClassifier linear;
  std::size_t instances = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  double pattern_accuracy = 0.0;
  double linear_accuracy = 0.0;
  std::vector<std::string> test_ids;
  std::vector<int> test_labels;
  std::vector<int> pattern_predictions;
  std::vector<int> linear_predictions;
  std::vector<TokenSequence> test_sequences;
};

/// Split, fit vocabulary on train, tokenize, mine, train the linear head and
/// score both classifiers on the held-out share.
ExperimentResult run_experiment(std::span<const ChromosomeImage> images, const PipelineConfig& cfg);

struct SweepGrid {
  std::vector<double> thresholds{0.0, 1.0, 2.0, 3.0};
  std::vector<int> K;           // empty: config K only
  std::vector<double> lambda;   // empty: config lambda only
  std::vector<int> min_run;     // empty: config min_run only
};

/// Abnormality sweep: split, fit the vocabulary and pattern bank on normal
/// training instances, then score the held-out instances (true class
/// labels) for every grid combination. K_over scales with K.
std::vector<SweepPoint> run_sweep(std::span<const ChromosomeImage> images, std::span<const char> abnormal,
                                  const PipelineConfig& cfg, const SweepGrid& grid);

/// instance_id -> carries a mutation, from a ground_truth.json document.
std::map<std::string, bool> abnormal_flags(const nlohmann::json& ground_truth);

/// Grayscale raster as RGB with the axis pixels painted pure red.
RgbImage axis_overlay(const Raster& pixels, const AxisPolyline& axis);

/// One line per metric: "metric,value".
std::string metrics_csv(const ExperimentResult& result, const PipelineConfig& cfg);

std::string sweep_csv(std::span<const SweepPoint> points, const PipelineConfig& cfg);
/// Scatter of (fpr, fnr); Pareto points are drawn filled in red.
std::string sweep_svg(std::span<const SweepPoint> points, std::span<const SweepPoint> front);

}  // namespace kseq
