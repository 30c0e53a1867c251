// SPDX-License-Identifier: Apache-2.0
// Brute-force reference implementations for the equivalence tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "kseq/analysis.hpp"
#include "kseq/grid.hpp"
#include "kseq/morphology.hpp"
#include "kseq/rng.hpp"
#include "kseq/seqmine.hpp"

namespace oracle {

// Levenshtein by plain recursion; exponential, fine for length <= 8.
inline int edit_distance(std::span<const int> a, std::span<const int> b) {
  if (a.empty()) return static_cast<int>(b.size());
  if (b.empty()) return static_cast<int>(a.size());
  const int sub = edit_distance(a.subspan(1), b.subspan(1)) + (a[0] != b[0]);
  const int del = edit_distance(a.subspan(1), b) + 1;
  const int ins = edit_distance(a, b.subspan(1)) + 1;
  return std::min({sub, del, ins});
}

// Apriori by enumerating every subset of the item universe (<= 12 items).
inline std::vector<kseq::Itemset> apriori(std::span<const std::vector<int>> tx, double min_support) {
  std::set<int> universe;
  for (const auto& t : tx) universe.insert(t.begin(), t.end());
  const std::vector<int> items(universe.begin(), universe.end());
  std::vector<kseq::Itemset> out;
  const std::size_t n = items.size();
  for (std::uint32_t bits = 1; bits < (1u << n); ++bits) {
    std::vector<int> set;
    for (std::size_t i = 0; i < n; ++i) {
      if (bits & (1u << i)) set.push_back(items[i]);
    }
    std::size_t hits = 0;
    for (const auto& t : tx) {
      const std::set<int> ts(t.begin(), t.end());
      hits += std::all_of(set.begin(), set.end(), [&](int x) { return ts.count(x) > 0; });
    }
    const double support = static_cast<double>(hits) / static_cast<double>(tx.size());
    if (support >= min_support) out.push_back({set, support});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.items.size() != b.items.size()) return a.items.size() < b.items.size();
    return a.items < b.items;
  });
  return out;
}

// Every window of every sequence, counted once per sequence.
inline std::vector<kseq::Pattern> window_patterns(std::span<const std::vector<int>> seqs, double min_support,
                                                  int max_len) {
  std::map<std::vector<int>, std::size_t> hits;
  for (const auto& s : seqs) {
    std::set<std::vector<int>> seen;
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (std::size_t len = 1; len <= static_cast<std::size_t>(max_len) && i + len <= s.size(); ++len) {
        seen.insert(std::vector<int>(s.begin() + i, s.begin() + i + len));
      }
    }
    for (const auto& w : seen) ++hits[w];
  }
  std::vector<kseq::Pattern> out;
  for (const auto& [w, h] : hits) {
    const double support = static_cast<double>(h) / static_cast<double>(seqs.size());
    if (support >= min_support) out.push_back({w, support});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.pattern.size() != b.pattern.size()) return a.pattern.size() < b.pattern.size();
    return a.pattern < b.pattern;
  });
  return out;
}

inline std::vector<int> nearest_centroid(std::span<const double> x, std::size_t rows,
                                         std::span<const double> centroids, std::size_t k, std::size_t dim) {
  std::vector<int> out;
  for (std::size_t i = 0; i < rows; ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      double d = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        const double diff = x[i * dim + j] - centroids[c * dim + j];
        d += diff * diff;
      }
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    out.push_back(best);
  }
  return out;
}

inline bool dominates(const kseq::SweepPoint& p, const kseq::SweepPoint& q) {
  return p.fnr <= q.fnr && p.fpr <= q.fpr && (p.fnr < q.fnr || p.fpr < q.fpr);
}

// O(n^2) dominance filter, result in (fnr, fpr) order with input order kept
// among exact duplicates.
inline std::vector<kseq::SweepPoint> pareto(std::span<const kseq::SweepPoint> pts) {
  std::vector<kseq::SweepPoint> out;
  for (const auto& q : pts) {
    bool dominated = false;
    for (const auto& p : pts) dominated = dominated || dominates(p, q);
    if (!dominated) out.push_back(q);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.fnr != b.fnr) return a.fnr < b.fnr;
    return a.fpr < b.fpr;
  });
  return out;
}

inline kseq::Mask erode(const kseq::Mask& m, const kseq::StructuringElement& se) {
  kseq::Mask out(m.rows(), m.cols(), 0);
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      bool all = true;
      for (const auto& o : se.offsets()) all = all && m.at_or(r + o.dy, c + o.dx, 0) != 0;
      out(r, c) = all ? 1 : 0;
    }
  }
  return out;
}

inline kseq::Mask random_mask(kseq::Rng& rng, int rows, int cols, double density) {
  kseq::Mask m(rows, cols, 0);
  for (auto& v : m.data()) v = rng.uniform() < density ? 1 : 0;
  return m;
}

inline bool subset_of(const kseq::Mask& a, const kseq::Mask& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.data()[i] && !b.data()[i]) return false;
  }
  return true;
}

}  // namespace oracle
