// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kseq/clustering.hpp"
#include "kseq/morphology.hpp"

namespace kseq {

inline constexpr int kSoc = -1;
inline constexpr int kEoc = -2;

/// SOC, run-length collapsed sub-chromosome tokens, EOC. positions[i] and
/// spans[i] describe interior token i (spans in axis pixels, positions as
/// span midpoints normalized by axis length).
struct TokenSequence {
  std::vector<int> tokens;
  std::vector<double> positions;
  std::vector<std::pair<double, double>> spans;
  std::string source;

  std::span<const int> interior() const {
    return tokens.size() < 2 ? std::span<const int>{} : std::span<const int>(tokens).subspan(1, tokens.size() - 2);
  }
  std::vector<int> interior_vec() const { auto i = interior(); return {i.begin(), i.end()}; }
};

/// Throws tokenizer.invalid_sequence when framing, run collapsing or
/// position ordering is violated.
void validate_sequence(const TokenSequence& seq);

/// Builds a framed, validated sequence from interior tokens; positions
/// default to evenly spaced midpoints. Without an axis at hand the spans are
/// fractions of the total length.
TokenSequence make_sequence(std::vector<int> interior, std::string source = {},
                            std::vector<double> positions = {});

enum class Orientation { forward, reversed };

/// The orientation whose interior is lexicographically smaller; palindromes
/// stay forward.
Orientation canonical_orientation(std::span<const int> interior);

struct TokenizerParams {
  int patch_size = 8;
  double fg_min = 0.3;
  double lambda = 0.25;
  int min_run = 1;
  int max_sweeps = kDefaultMaxSweeps;
  int histogram_bins = kDefaultHistogramBins;
  AxisOptions axis;
};

/// Every intermediate product of one tokenization.
struct Tokenization {
  TokenSequence sequence;
  AxisPolyline axis;  // oriented to match the sequence
  PatchGrid grid;
  FeatureMatrix features;
  LabelField raw_labels;
  LabelField smoothed;
  std::vector<double> patch_arclengths;  // along the oriented axis
};

/// Full pipeline: patches, features (built-in unless `imported` is given),
/// assignment, smoothing, axis ordering, windowed majority vote, run
/// collapsing, orientation, framing.
Tokenization tokenize_detailed(const ChromosomeImage& img, const ClusterModel& model, const TokenizerParams& params,
                               const FeatureMatrix* imported = nullptr);

TokenSequence tokenize(const ChromosomeImage& img, const ClusterModel& model, const TokenizerParams& params,
                       const FeatureMatrix* imported = nullptr);

inline constexpr double kPositionScale = 100.0;

/// Sinusoidal encoding: [2i] = sin(pos*L / 10000^(2i/D)), [2i+1] = cos(...).
std::vector<double> positional_encoding(double pos, int d_pe);

struct EncodedSequence {
  TokenSequence base;
  std::vector<std::vector<double>> vectors;  // centroid followed by positional encoding
};

EncodedSequence encode(const TokenSequence& seq, const ClusterModel& model, int d_pe);

/// "id<TAB>S t1 ... tn E<TAB>p1,...,pn"
std::string format_token_line(const TokenSequence& seq);
TokenSequence parse_token_line(const std::string& line);

}  // namespace kseq
