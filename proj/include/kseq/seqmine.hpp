// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

namespace kseq {

using TokenList = std::vector<int>;

struct Itemset {
  std::vector<int> items;  // ascending
  double support = 0.0;
  friend bool operator==(const Itemset&, const Itemset&) = default;
};

/// Frequent itemsets with support >= min_support via FP-tree construction and
/// recursive conditional-tree mining. Sorted by (size, items).
std::vector<Itemset> fpgrowth(std::span<const std::vector<int>> transactions, double min_support);

struct Pattern {
  TokenList pattern;
  double support = 0.0;
  friend bool operator==(const Pattern&, const Pattern&) = default;
};

/// Contiguous subsequences of length <= max_len present in at least
/// min_support of the sequences. Grown level by level from frequent
/// prefixes; sorted by (length, pattern).
std::vector<Pattern> mine_subsequences(std::span<const TokenList> sequences, double min_support, int max_len);

struct ClassPatterns {
  TokenList canonical;
  std::vector<Pattern> frequent;
  int count = 0;
};

struct PatternBank {
  std::map<int, ClassPatterns> classes;
  double min_support = 0.0;
  int max_len = 0;
};

inline constexpr int kDefaultPatternMaxLen = 6;

/// Canonical = modal interior sequence (ties: lexicographically smallest);
/// frequent = mine_subsequences per class. Every label in
/// `required_classes` must have at least one sequence.
PatternBank build_pattern_bank(std::span<const std::pair<int, TokenList>> labeled, double min_support,
                               int max_len = kDefaultPatternMaxLen, std::span<const int> required_classes = {});

/// Laplace-smoothed n-gram model over tokens 0..vocab_size-1 plus EOC.
/// Contexts are the previous n-1 tokens, padded with SOC.
struct NGramModel {
  int order = 2;
  int vocab_size = 0;  // interior token ids; the outcome space adds EOC
  double alpha = 1.0;
  std::map<std::vector<int>, std::map<int, double>> counts;

  int outcomes() const noexcept { return vocab_size + 1; }
  double probability(const std::vector<int>& context, int next) const;
};

NGramModel fit_ngram(std::span<const TokenList> sequences, int n, double alpha, int vocab_size);

/// Mean negative log-likelihood per transition (nats), including the final
/// transition to EOC.
double score_ngram(const NGramModel& model, const TokenList& sequence);

}  // namespace kseq
