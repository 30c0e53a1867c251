// SPDX-License-Identifier: Apache-2.0
#include "kseq/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "kseq/error.hpp"
#include "kseq/rng.hpp"

namespace kseq {

// ---------------------------------------------------------------------------
// Linear head

std::vector<double> LinearClassifier::standardize(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(num_features)) {
    throw Error("analysis.dimension_mismatch", "feature vector has wrong length");
  }
  std::vector<double> z(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) z[j] = (x[j] - feature_mean[j]) / feature_scale[j];
  return z;
}

namespace {

void softmax_logits(std::span<const double> z, int num_classes, std::span<const double> weights,
                    std::span<const double> bias, std::vector<double>& out) {
  const std::size_t f = z.size();
  out.assign(static_cast<std::size_t>(num_classes), 0.0);
  double mx = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < num_classes; ++c) {
    double s = bias[static_cast<std::size_t>(c)];
    const double* w = weights.data() + static_cast<std::size_t>(c) * f;
    for (std::size_t j = 0; j < f; ++j) s += w[j] * z[j];
    out[static_cast<std::size_t>(c)] = s;
    mx = std::max(mx, s);
  }
  double total = 0.0;
  for (auto& v : out) {
    v = std::exp(v - mx);
    total += v;
  }
  for (auto& v : out) v /= total;
}

}  // namespace

std::vector<double> LinearClassifier::predict_proba(std::span<const double> x) const {
  const auto z = standardize(x);
  std::vector<double> p;
  softmax_logits(z, num_classes, weights, bias, p);
  return p;
}

int LinearClassifier::predict(std::span<const double> x) const {
  const auto p = predict_proba(x);
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

double linear_loss(const Dataset& data, int num_classes, std::span<const double> weights,
                   std::span<const double> bias, double l2, std::vector<double>* gradient) {
  const std::size_t f = data.num_features;
  const std::size_t c_count = static_cast<std::size_t>(num_classes);
  const double n = static_cast<double>(data.size());
  if (gradient) gradient->assign(c_count * f + c_count, 0.0);
  double loss = 0.0;
  std::vector<double> p;
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto x = data.row(i);
    softmax_logits(x, num_classes, weights, bias, p);
    const auto y = static_cast<std::size_t>(data.y[i]);
    loss -= std::log(std::max(p[y], 1e-300));
    if (!gradient) continue;
    for (std::size_t c = 0; c < c_count; ++c) {
      const double d = (p[c] - (c == y ? 1.0 : 0.0)) / n;
      double* g = gradient->data() + c * f;
      for (std::size_t j = 0; j < f; ++j) g[j] += d * x[j];
      (*gradient)[c_count * f + c] += d;
    }
  }
  loss /= n;
  double reg = 0.0;
  for (double w : weights) reg += w * w;
  loss += l2 * reg;
  if (gradient) {
    for (std::size_t k = 0; k < c_count * f; ++k) (*gradient)[k] += 2.0 * l2 * weights[k];
  }
  return loss;
}

LinearClassifier train_linear(const Dataset& data, const LinearHyperParams& hp, int num_classes) {
  if (data.size() == 0) throw Error("analysis.empty_dataset", "no training examples");
  const std::size_t f = data.num_features;
  std::vector<int> seen(static_cast<std::size_t>(num_classes), 0);
  for (int y : data.y) {
    if (y < 0 || y >= num_classes) throw Error("analysis.bad_label", "label out of range");
    seen[static_cast<std::size_t>(y)] = 1;
  }
  for (int c = 0; c < num_classes; ++c) {
    if (!seen[static_cast<std::size_t>(c)]) {
      throw Error("analysis.missing_class", "class " + std::to_string(c) + " absent from training data");
    }
  }
  for (double v : data.x) {
    if (!std::isfinite(v)) throw Error("analysis.non_finite", "training features contain non-finite values");
  }

  LinearClassifier model;
  model.num_classes = num_classes;
  model.num_features = static_cast<int>(f);
  model.hyperparams = hp;
  model.feature_mean.assign(f, 0.0);
  model.feature_scale.assign(f, 1.0);
  const double n = static_cast<double>(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    for (std::size_t j = 0; j < f; ++j) model.feature_mean[j] += data.row(i)[j] / n;
  for (std::size_t j = 0; j < f; ++j) {
    double var = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double d = data.row(i)[j] - model.feature_mean[j];
      var += d * d / n;
    }
    model.feature_scale[j] = var > 1e-24 ? std::sqrt(var) : 1.0;
  }
  Dataset z{f, {}, data.y};
  z.x.reserve(data.x.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto s = model.standardize(data.row(i));
    z.x.insert(z.x.end(), s.begin(), s.end());
  }

  // Fingerprint over the raw training data.
  std::uint64_t h = fnv1a("linear");
  auto mix = [&](const void* p, std::size_t bytes) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < bytes; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  };
  mix(data.x.data(), data.x.size() * sizeof(double));
  mix(data.y.data(), data.y.size() * sizeof(int));
  std::ostringstream fp;
  fp << std::hex << h;
  model.trained_on = fp.str();

  Rng rng(hp.seed);
  const std::size_t c_count = static_cast<std::size_t>(num_classes);
  model.weights.resize(c_count * f);
  for (auto& w : model.weights) w = rng.uniform(-0.01, 0.01);
  model.bias.assign(c_count, 0.0);

  std::vector<double> grad;
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    const double loss = linear_loss(z, num_classes, model.weights, model.bias, hp.l2, &grad);
    model.loss_history.push_back(loss);
    for (std::size_t k = 0; k < c_count * f; ++k) model.weights[k] -= hp.learning_rate * grad[k];
    for (std::size_t c = 0; c < c_count; ++c) model.bias[c] -= hp.learning_rate * grad[c_count * f + c];
  }
  model.loss_history.push_back(linear_loss(z, num_classes, model.weights, model.bias, hp.l2));
  return model;
}

std::vector<double> pooled_features(const FeatureMatrix& patch_features, const EncodedSequence& encoded) {
  const std::size_t d = patch_features.dim();
  std::vector<double> out(d, 0.0);
  const double n = static_cast<double>(patch_features.rows());
  for (std::size_t i = 0; i < patch_features.rows(); ++i) {
    auto r = patch_features.row(i);
    for (std::size_t j = 0; j < d; ++j) out[j] += r[j] / n;
  }
  if (encoded.vectors.empty()) throw Error("analysis.empty_sequence", "cannot pool an empty token sequence");
  const std::size_t e = encoded.vectors.front().size();
  std::vector<double> mean(e, 0.0);
  for (const auto& v : encoded.vectors)
    for (std::size_t j = 0; j < e; ++j) mean[j] += v[j] / static_cast<double>(encoded.vectors.size());
  out.insert(out.end(), mean.begin(), mean.end());
  return out;
}

// ---------------------------------------------------------------------------
// Sequence comparison

EditResult edit_distance(std::span<const int> a, std::span<const int> b) {
  const std::size_t n = a.size(), m = b.size();
  Grid<int> d(static_cast<int>(n + 1), static_cast<int>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) d(static_cast<int>(i), 0) = static_cast<int>(i);
  for (std::size_t j = 0; j <= m; ++j) d(0, static_cast<int>(j)) = static_cast<int>(j);
  for (int i = 1; i <= static_cast<int>(n); ++i) {
    for (int j = 1; j <= static_cast<int>(m); ++j) {
      const int sub = d(i - 1, j - 1) + (a[static_cast<std::size_t>(i - 1)] != b[static_cast<std::size_t>(j - 1)]);
      d(i, j) = std::min({sub, d(i - 1, j) + 1, d(i, j - 1) + 1});
    }
  }
  EditResult result;
  result.distance = d(static_cast<int>(n), static_cast<int>(m));
  int i = static_cast<int>(n), j = static_cast<int>(m);
  std::vector<EditStep> rev;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = a[static_cast<std::size_t>(i - 1)] == b[static_cast<std::size_t>(j - 1)];
      if (d(i, j) == d(i - 1, j - 1) + (same ? 0 : 1)) {
        if (!same) rev.push_back({EditOp::substitute, j - 1, b[static_cast<std::size_t>(j - 1)]});
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && d(i, j) == d(i - 1, j) + 1) {
      rev.push_back({EditOp::remove, j, a[static_cast<std::size_t>(i - 1)]});
      --i;
      continue;
    }
    rev.push_back({EditOp::insert, j - 1, b[static_cast<std::size_t>(j - 1)]});
    --j;
  }
  result.script.assign(rev.rbegin(), rev.rend());
  return result;
}

TokenList apply_script(std::span<const int> a, std::span<const EditStep> script) {
  TokenList out(a.begin(), a.end());
  for (const auto& s : script) {
    const auto at = out.begin() + s.index;
    switch (s.op) {
      case EditOp::insert: out.insert(at, s.token); break;
      case EditOp::remove: out.erase(at); break;
      case EditOp::substitute: *at = s.token; break;
    }
  }
  return out;
}

std::string to_string(EditOp op) {
  switch (op) {
    case EditOp::insert: return "insert";
    case EditOp::remove: return "delete";
    case EditOp::substitute: return "substitute";
  }
  return "?";
}

PatternMatch classify_by_pattern(const TokenSequence& seq, const PatternBank& bank) {
  if (bank.classes.empty()) throw Error("analysis.empty_bank", "pattern bank has no classes");
  const auto observed = seq.interior();
  PatternMatch best{-1, std::numeric_limits<int>::max()};
  for (const auto& [label, cp] : bank.classes) {  // ascending labels
    const int d = edit_distance(cp.canonical, observed).distance;
    if (d < best.distance) best = {label, d};
  }
  return best;
}

DetectionResult detect_abnormal(const TokenSequence& seq, const PatternBank& bank, int predicted_class,
                                double threshold) {
  auto it = bank.classes.find(predicted_class);
  if (it == bank.classes.end()) {
    throw Error("analysis.unknown_class", "class " + std::to_string(predicted_class) + " not in pattern bank");
  }
  DetectionResult r;
  r.canonical = it->second.canonical;
  r.observed = seq.interior_vec();
  auto ed = edit_distance(r.canonical, r.observed);
  r.score = ed.distance;
  r.edit_script = std::move(ed.script);
  r.verdict = r.score > threshold ? Verdict::abnormal : Verdict::normal;
  return r;
}

// ---------------------------------------------------------------------------
// Operating points

std::string SweepParams::describe() const {
  std::ostringstream os;
  os << "threshold=" << threshold;
  if (K > 0) os << ";K=" << K;
  if (min_run > 0) os << ";lambda=" << lambda << ";min_run=" << min_run;
  return os.str();
}

double safe_rate(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::vector<SweepPoint> sweep(std::span<const LabeledSequence> data, const PatternBank& bank,
                              std::span<const double> thresholds, const SweepParams& base) {
  bool any_pos = false, any_neg = false;
  for (const auto& d : data) (d.abnormal ? any_pos : any_neg) = true;
  if (!any_pos || !any_neg) throw Error("analysis.single_class", "sweep needs both normal and abnormal instances");
  std::vector<double> scores;
  scores.reserve(data.size());
  for (const auto& d : data) {
    scores.push_back(detect_abnormal(d.sequence, bank, d.class_label, 0.0).score);
  }
  std::vector<SweepPoint> out;
  for (double t : thresholds) {
    SweepPoint p;
    p.params = base;
    p.params.threshold = t;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const bool flagged = scores[i] > t;
      if (data[i].abnormal) {
        (flagged ? p.tp : p.fn)++;
      } else {
        (flagged ? p.fp : p.tn)++;
      }
    }
    p.fnr = safe_rate(p.fn, p.fn + p.tp);
    p.fpr = safe_rate(p.fp, p.fp + p.tn);
    out.push_back(p);
  }
  return out;
}

std::vector<SweepPoint> pareto_front(std::span<const SweepPoint> points) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (points[a].fnr != points[b].fnr) return points[a].fnr < points[b].fnr;
    return points[a].fpr < points[b].fpr;
  });
  // Scanning by ascending fnr, a point survives when its fpr is below every
  // fpr seen at strictly smaller fnr, and it is not beaten on fpr within its
  // own fnr group.
  std::vector<SweepPoint> front;
  double best_prev = std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && points[order[j]].fnr == points[order[i]].fnr) ++j;
    const double group_min = points[order[i]].fpr;
    if (group_min < best_prev) {
      for (std::size_t k = i; k < j && points[order[k]].fpr == group_min; ++k) front.push_back(points[order[k]]);
      best_prev = group_min;
    }
    i = j;
  }
  return front;
}

}  // namespace kseq
