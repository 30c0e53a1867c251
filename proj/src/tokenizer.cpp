// SPDX-License-Identifier: Apache-2.0
#include "kseq/tokenizer.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "kseq/error.hpp"

namespace kseq {

void validate_sequence(const TokenSequence& seq) {
  auto fail = [](const std::string& why) { throw Error("tokenizer.invalid_sequence", why); };
  if (seq.tokens.size() < 2 || seq.tokens.front() != kSoc || seq.tokens.back() != kEoc) {
    fail("sequence must start with SOC and end with EOC");
  }
  auto interior = seq.interior();
  for (std::size_t i = 0; i < interior.size(); ++i) {
    if (interior[i] < 0) fail("framing token inside the sequence");
    if (i > 0 && interior[i] == interior[i - 1]) fail("adjacent interior tokens are equal");
  }
  if (seq.positions.size() != interior.size() || seq.spans.size() != interior.size()) {
    fail("positions/spans do not match interior length");
  }
  for (std::size_t i = 0; i < interior.size(); ++i) {
    if (!(seq.positions[i] > 0.0 && seq.positions[i] < 1.0)) fail("position outside (0, 1)");
    if (i > 0 && !(seq.positions[i] > seq.positions[i - 1])) fail("positions not strictly increasing");
    if (seq.spans[i].first > seq.spans[i].second) fail("inverted span");
    if (i > 0 && seq.spans[i].first < seq.spans[i - 1].second) fail("overlapping spans");
  }
}

TokenSequence make_sequence(std::vector<int> interior, std::string source, std::vector<double> positions) {
  TokenSequence seq;
  seq.source = std::move(source);
  const std::size_t n = interior.size();
  if (positions.empty()) {
    for (std::size_t i = 0; i < n; ++i) positions.push_back((i + 0.5) / static_cast<double>(n));
  }
  if (positions.size() != n) throw Error("tokenizer.bad_positions", "one position per interior token required");
  seq.tokens.reserve(n + 2);
  seq.tokens.push_back(kSoc);
  seq.tokens.insert(seq.tokens.end(), interior.begin(), interior.end());
  seq.tokens.push_back(kEoc);
  // Spans tile [0, 1] with boundaries halfway between positions.
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = i == 0 ? 0.0 : 0.5 * (positions[i - 1] + positions[i]);
    const double hi = i + 1 == n ? 1.0 : 0.5 * (positions[i] + positions[i + 1]);
    seq.spans.emplace_back(lo, hi);
  }
  seq.positions = std::move(positions);
  validate_sequence(seq);
  return seq;
}

Orientation canonical_orientation(std::span<const int> interior) {
  return std::lexicographical_compare(interior.rbegin(), interior.rend(), interior.begin(), interior.end())
             ? Orientation::reversed
             : Orientation::forward;
}

namespace {

struct Run {
  int label;
  std::size_t count;  // patches
  double first_s;
  double last_s;
};

// Majority label among patches within half a patch of each patch along the
// axis; ties go to the lowest label so the vote is independent of scan order.
std::vector<int> windowed_majority(const std::vector<double>& s, const std::vector<int>& labels, double half_width) {
  const std::size_t n = s.size();
  std::vector<int> out(n);
  std::size_t lo = 0, hi = 0;
  std::map<int, int> counts;
  for (std::size_t i = 0; i < n; ++i) {
    while (hi < n && s[hi] <= s[i] + half_width) ++counts[labels[hi++]];
    while (s[lo] < s[i] - half_width) {
      if (--counts[labels[lo]] == 0) counts.erase(labels[lo]);
      ++lo;
    }
    int best = -1, best_count = 0;
    for (const auto& [label, c] : counts) {
      if (c > best_count) {
        best = label;
        best_count = c;
      }
    }
    out[i] = best;
  }
  return out;
}

std::vector<Run> collapse(const std::vector<double>& s, const std::vector<int>& labels) {
  std::vector<Run> runs;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!runs.empty() && runs.back().label == labels[i]) {
      ++runs.back().count;
      runs.back().last_s = s[i];
    } else {
      runs.push_back({labels[i], 1, s[i], s[i]});
    }
  }
  return runs;
}

std::vector<Run> drop_short_runs(std::vector<Run> runs, int min_run) {
  if (min_run <= 1) return runs;
  std::vector<Run> kept;
  for (const auto& r : runs) {
    if (static_cast<int>(r.count) < min_run) continue;
    if (!kept.empty() && kept.back().label == r.label) {
      kept.back().count += r.count;
      kept.back().last_s = r.last_s;
    } else {
      kept.push_back(r);
    }
  }
  return kept;
}

}  // namespace

Tokenization tokenize_detailed(const ChromosomeImage& img, const ClusterModel& model, const TokenizerParams& params,
                               const FeatureMatrix* imported) {
  Tokenization t;
  AxisPolyline axis = longitudinal_axis(img.mask, params.axis);
  t.grid = extract_patches(img, params.patch_size, params.fg_min);
  if (imported) {
    if (imported->rows() != t.grid.patches.size()) {
      throw Error("features.row_mismatch", "imported embeddings do not match the patch grid");
    }
    t.features = *imported;
  } else {
    t.features = banding_features(img, t.grid, params.histogram_bins);
  }
  t.raw_labels = assign(model, t.features);
  t.smoothed = smooth_labels(t.raw_labels, t.grid, model, t.features, params.lambda, params.max_sweeps);

  const std::size_t n = t.grid.patches.size();
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = project_to_axis(t.grid.patches[i].center, axis);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s[a] < s[b]; });
  std::vector<double> sorted_s(n);
  std::vector<int> sorted_labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    sorted_s[i] = s[order[i]];
    sorted_labels[i] = t.smoothed.labels[order[i]];
  }
  const auto voted = windowed_majority(sorted_s, sorted_labels, params.patch_size / 2.0);
  auto runs = drop_short_runs(collapse(sorted_s, voted), params.min_run);
  if (runs.empty()) throw Error("tokenizer.empty_sequence", "no sub-chromosome runs survived filtering");

  const double total = axis.length();
  if (!(total > 0.0)) throw Error("tokenizer.degenerate_axis", "axis has zero length");
  std::vector<int> interior;
  std::vector<std::pair<double, double>> spans;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    interior.push_back(runs[k].label);
    const double lo = k == 0 ? 0.0 : 0.5 * (runs[k - 1].last_s + runs[k].first_s);
    const double hi = k + 1 == runs.size() ? total : 0.5 * (runs[k].last_s + runs[k + 1].first_s);
    spans.emplace_back(lo, hi);
  }

  if (canonical_orientation(interior) == Orientation::reversed) {
    std::reverse(interior.begin(), interior.end());
    std::reverse(spans.begin(), spans.end());
    for (auto& sp : spans) sp = {total - sp.second, total - sp.first};
    for (auto& v : s) v = total - v;
    axis = reverse_axis(axis);
  }

  TokenSequence& seq = t.sequence;
  seq.source = img.instance_id;
  seq.tokens.push_back(kSoc);
  seq.tokens.insert(seq.tokens.end(), interior.begin(), interior.end());
  seq.tokens.push_back(kEoc);
  seq.spans = std::move(spans);
  for (const auto& sp : seq.spans) seq.positions.push_back(0.5 * (sp.first + sp.second) / total);
  t.axis = std::move(axis);
  t.patch_arclengths = std::move(s);
  validate_sequence(seq);
  return t;
}

TokenSequence tokenize(const ChromosomeImage& img, const ClusterModel& model, const TokenizerParams& params,
                       const FeatureMatrix* imported) {
  return tokenize_detailed(img, model, params, imported).sequence;
}

std::vector<double> positional_encoding(double pos, int d_pe) {
  if (d_pe < 2 || d_pe % 2 != 0) throw Error("tokenizer.bad_pe_dim", "positional encoding dim must be even and >= 2");
  std::vector<double> out(static_cast<std::size_t>(d_pe));
  for (int i = 0; i < d_pe / 2; ++i) {
    const double angle = pos * kPositionScale / std::pow(10000.0, 2.0 * i / d_pe);
    out[static_cast<std::size_t>(2 * i)] = std::sin(angle);
    out[static_cast<std::size_t>(2 * i + 1)] = std::cos(angle);
  }
  return out;
}

EncodedSequence encode(const TokenSequence& seq, const ClusterModel& model, int d_pe) {
  EncodedSequence out{seq, {}};
  auto interior = seq.interior();
  if (seq.positions.size() != interior.size()) throw Error("tokenizer.bad_positions", "sequence lacks positions");
  for (std::size_t i = 0; i < interior.size(); ++i) {
    const int tok = interior[i];
    if (tok < 0 || static_cast<std::size_t>(tok) >= model.K) {
      throw Error("tokenizer.token_out_of_range", "token " + std::to_string(tok) + " outside vocabulary");
    }
    auto c = model.centroid(static_cast<std::size_t>(tok));
    std::vector<double> v(c.begin(), c.end());
    auto pe = positional_encoding(seq.positions[i], d_pe);
    v.insert(v.end(), pe.begin(), pe.end());
    out.vectors.push_back(std::move(v));
  }
  return out;
}

std::string format_token_line(const TokenSequence& seq) {
  std::string out = seq.source;
  out += '\t';
  for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
    if (i) out += ' ';
    const int t = seq.tokens[i];
    out += t == kSoc ? "S" : t == kEoc ? "E" : std::to_string(t);
  }
  out += '\t';
  std::array<char, 64> buf{};
  for (std::size_t i = 0; i < seq.positions.size(); ++i) {
    if (i) out += ',';
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), seq.positions[i]);
    out.append(buf.data(), p);
  }
  return out;
}

TokenSequence parse_token_line(const std::string& line) {
  const auto tab1 = line.find('\t');
  const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
  if (tab2 == std::string::npos) throw Error("tokenizer.bad_dump", "token line needs three tab-separated fields");
  std::vector<int> interior;
  std::istringstream ts(line.substr(tab1 + 1, tab2 - tab1 - 1));
  std::string tok;
  std::vector<std::string> parts;
  while (ts >> tok) parts.push_back(tok);
  if (parts.size() < 2 || parts.front() != "S" || parts.back() != "E") {
    throw Error("tokenizer.bad_dump", "token field must be framed by S and E");
  }
  for (std::size_t i = 1; i + 1 < parts.size(); ++i) {
    int v = 0;
    auto [p, ec] = std::from_chars(parts[i].data(), parts[i].data() + parts[i].size(), v);
    if (ec != std::errc{} || p != parts[i].data() + parts[i].size()) {
      throw Error("tokenizer.bad_dump", "bad token '" + parts[i] + "'");
    }
    interior.push_back(v);
  }
  std::vector<double> positions;
  const std::string pos_field = line.substr(tab2 + 1);
  const char* ptr = pos_field.data();
  const char* end = ptr + pos_field.size();
  while (ptr < end && *ptr != '\r' && *ptr != '\n') {
    double v = 0.0;
    auto [p, ec] = std::from_chars(ptr, end, v);
    if (ec != std::errc{}) throw Error("tokenizer.bad_dump", "bad position value");
    positions.push_back(v);
    ptr = p;
    if (ptr < end && *ptr == ',') ++ptr;
  }
  return make_sequence(std::move(interior), line.substr(0, tab1), std::move(positions));
}

}  // namespace kseq
