// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kseq/seqmine.hpp"
#include "kseq/tokenizer.hpp"

namespace kseq {

// ---------------------------------------------------------------------------
// Linear head

struct LinearHyperParams {
  double learning_rate = 0.5;
  double l2 = 1e-4;
  int epochs = 400;
  std::uint64_t seed = 0;
};

/// Multinomial logistic regression on standardized inputs.
struct LinearClassifier {
  int num_classes = kNumClasses;
  int num_features = 0;
  std::vector<double> weights;  // num_classes x num_features
  std::vector<double> bias;     // num_classes
  std::vector<double> feature_mean;
  std::vector<double> feature_scale;
  std::string trained_on;  // dataset fingerprint
  LinearHyperParams hyperparams;
  std::vector<double> loss_history;

  std::vector<double> standardize(std::span<const double> x) const;
  /// Softmax probabilities for one raw feature vector.
  std::vector<double> predict_proba(std::span<const double> x) const;
  int predict(std::span<const double> x) const;
};

/// Row-major N x F design matrix with integer labels.
struct Dataset {
  std::size_t num_features = 0;
  std::vector<double> x;
  std::vector<int> y;

  std::size_t size() const noexcept { return y.size(); }
  std::span<const double> row(std::size_t i) const { return {x.data() + i * num_features, num_features}; }
};

/// Mean cross-entropy + l2 * ||W||^2 on already-standardized inputs, and its
/// gradient (same layout as weights followed by bias).
double linear_loss(const Dataset& standardized, int num_classes, std::span<const double> weights,
                   std::span<const double> bias, double l2, std::vector<double>* gradient = nullptr);

/// Full-batch gradient descent. Every class in 0..num_classes-1 must appear.
LinearClassifier train_linear(const Dataset& data, const LinearHyperParams& hp, int num_classes = kNumClasses);

/// Mean patch feature followed by the mean encoded token vector.
std::vector<double> pooled_features(const FeatureMatrix& patch_features, const EncodedSequence& encoded);

// ---------------------------------------------------------------------------
// Sequence comparison

enum class EditOp { insert, remove, substitute };

struct EditStep {
  EditOp op;
  int index;  // position in the partially edited list, applying steps in order
  int token;  // inserted or substituted-in token; removed token for `remove`
  friend bool operator==(const EditStep&, const EditStep&) = default;
};

struct EditResult {
  int distance = 0;
  std::vector<EditStep> script;
};

/// Unit-cost Levenshtein distance from `a` to `b`; the backtrace prefers
/// substitute (or match), then delete, then insert.
EditResult edit_distance(std::span<const int> a, std::span<const int> b);

/// Replays a script on `a`.
TokenList apply_script(std::span<const int> a, std::span<const EditStep> script);

std::string to_string(EditOp op);

struct PatternMatch {
  int label = -1;
  int distance = 0;
};

/// Class whose canonical sequence is nearest in edit distance (lowest label
/// on ties).
PatternMatch classify_by_pattern(const TokenSequence& seq, const PatternBank& bank);

enum class Verdict { normal, abnormal };

struct DetectionResult {
  Verdict verdict = Verdict::normal;
  double score = 0.0;
  TokenList canonical;
  TokenList observed;
  std::vector<EditStep> edit_script;
};

DetectionResult detect_abnormal(const TokenSequence& seq, const PatternBank& bank, int predicted_class,
                                double threshold);

// ---------------------------------------------------------------------------
// Operating points

struct SweepParams {
  double threshold = 0.0;
  // Tokenizer knobs that produced the sequences; informational here.
  int K = 0;
  double lambda = 0.0;
  int min_run = 0;

  std::string describe() const;
};

struct SweepPoint {
  SweepParams params;
  std::size_t fn = 0, fp = 0, tn = 0, tp = 0;
  double fnr = 0.0;
  double fpr = 0.0;
};

struct LabeledSequence {
  TokenSequence sequence;
  int class_label = 0;
  bool abnormal = false;
};

/// Rate = 0 when the denominator is 0.
double safe_rate(std::size_t num, std::size_t den);

/// One point per threshold, abnormal being the positive class.
std::vector<SweepPoint> sweep(std::span<const LabeledSequence> data, const PatternBank& bank,
                              std::span<const double> thresholds, const SweepParams& base = {});

/// Points not dominated in (fnr, fpr) minimisation, sorted by fnr then fpr.
std::vector<SweepPoint> pareto_front(std::span<const SweepPoint> points);

}  // namespace kseq
