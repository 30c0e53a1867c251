// SPDX-License-Identifier: Apache-2.0
#include "kseq/seqmine.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <string>

#include "kseq/error.hpp"
#include "kseq/tokenizer.hpp"

namespace kseq {
namespace {

void check_support(double min_support) {
  if (!(min_support > 0.0 && min_support <= 1.0)) {
    throw Error("seqmine.bad_support", "min_support must lie in (0, 1]");
  }
}

bool frequent_enough(std::size_t count, std::size_t total, double min_support) {
  return static_cast<double>(count) / static_cast<double>(total) >= min_support;
}

struct FpNode {
  int item = -1;
  std::size_t count = 0;
  FpNode* parent = nullptr;
  std::map<int, std::unique_ptr<FpNode>> children;
};

struct FpTree {
  FpNode root;
  // item -> every node carrying it
  std::map<int, std::vector<FpNode*>> header;
  // item -> rank in the global frequency order (smaller = more frequent)
  std::map<int, std::size_t> rank;

  void insert(const std::vector<int>& ordered, std::size_t count) {
    FpNode* node = &root;
    for (int item : ordered) {
      auto& child = node->children[item];
      if (!child) {
        child = std::make_unique<FpNode>();
        child->item = item;
        child->parent = node;
        header[item].push_back(child.get());
      }
      child->count += count;
      node = child.get();
    }
  }
};

using WeightedTransactions = std::vector<std::pair<std::vector<int>, std::size_t>>;

FpTree build_tree(const WeightedTransactions& txns, std::size_t min_count) {
  std::map<int, std::size_t> freq;
  for (const auto& [items, c] : txns)
    for (int it : items) freq[it] += c;
  std::vector<std::pair<int, std::size_t>> kept;
  for (const auto& [it, c] : freq)
    if (c >= min_count) kept.emplace_back(it, c);
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  FpTree tree;
  for (std::size_t i = 0; i < kept.size(); ++i) tree.rank[kept[i].first] = i;
  for (const auto& [items, c] : txns) {
    std::vector<int> ordered;
    for (int it : items)
      if (tree.rank.count(it)) ordered.push_back(it);
    std::sort(ordered.begin(), ordered.end(), [&](int a, int b) { return tree.rank[a] < tree.rank[b]; });
    tree.insert(ordered, c);
  }
  return tree;
}

void mine_tree(const FpTree& tree, std::size_t min_count, std::vector<int>& suffix,
               std::map<std::vector<int>, std::size_t>& found) {
  for (const auto& [item, nodes] : tree.header) {
    std::size_t support = 0;
    for (const auto* node : nodes) support += node->count;
    if (support < min_count) continue;
    suffix.push_back(item);
    std::vector<int> key = suffix;
    std::sort(key.begin(), key.end());
    found[key] = support;

    // Conditional pattern base: prefix paths of every node carrying `item`.
    WeightedTransactions base;
    for (const auto* node : nodes) {
      std::vector<int> path;
      for (const FpNode* p = node->parent; p && p->item >= 0; p = p->parent) path.push_back(p->item);
      if (!path.empty()) base.emplace_back(std::move(path), node->count);
    }
    if (!base.empty()) {
      FpTree conditional = build_tree(base, min_count);
      if (!conditional.header.empty()) mine_tree(conditional, min_count, suffix, found);
    }
    suffix.pop_back();
  }
}

}  // namespace

std::vector<Itemset> fpgrowth(std::span<const std::vector<int>> transactions, double min_support) {
  check_support(min_support);
  if (transactions.empty()) throw Error("seqmine.empty_input", "fpgrowth needs at least one transaction");
  const std::size_t total = transactions.size();
  // Smallest integer count meeting the support threshold.
  std::size_t min_count = static_cast<std::size_t>(std::ceil(min_support * static_cast<double>(total)));
  while (min_count > 0 && frequent_enough(min_count - 1, total, min_support)) --min_count;
  while (!frequent_enough(min_count, total, min_support)) ++min_count;
  min_count = std::max<std::size_t>(min_count, 1);

  WeightedTransactions txns;
  txns.reserve(total);
  for (const auto& t : transactions) {
    std::set<int> uniq(t.begin(), t.end());
    txns.emplace_back(std::vector<int>(uniq.begin(), uniq.end()), 1);
  }
  FpTree tree = build_tree(txns, min_count);
  std::map<std::vector<int>, std::size_t> found;
  std::vector<int> suffix;
  mine_tree(tree, min_count, suffix, found);

  std::vector<Itemset> out;
  out.reserve(found.size());
  for (const auto& [items, c] : found) out.push_back({items, static_cast<double>(c) / static_cast<double>(total)});
  std::stable_sort(out.begin(), out.end(), [](const Itemset& a, const Itemset& b) {
    if (a.items.size() != b.items.size()) return a.items.size() < b.items.size();
    return a.items < b.items;
  });
  return out;
}

std::vector<Pattern> mine_subsequences(std::span<const TokenList> sequences, double min_support, int max_len) {
  check_support(min_support);
  if (sequences.empty()) throw Error("seqmine.empty_input", "mine_subsequences needs at least one sequence");
  const std::size_t total = sequences.size();

  // Occurrence list: (sequence index, start offset) for the current pattern.
  struct Occurrence {
    std::size_t seq;
    std::size_t start;
  };
  std::map<TokenList, std::vector<Occurrence>> level;
  for (std::size_t s = 0; s < sequences.size(); ++s)
    for (std::size_t i = 0; i < sequences[s].size(); ++i) level[{sequences[s][i]}].push_back({s, i});

  auto distinct_sequences = [](const std::vector<Occurrence>& occ) {
    std::size_t n = 0;
    std::size_t last = static_cast<std::size_t>(-1);
    for (const auto& o : occ) {
      if (o.seq != last) ++n;
      last = o.seq;
    }
    return n;
  };

  std::vector<Pattern> out;
  for (int len = 1; len <= max_len && !level.empty(); ++len) {
    std::map<TokenList, std::vector<Occurrence>> next;
    for (auto& [pattern, occ] : level) {
      const std::size_t support = distinct_sequences(occ);
      if (!frequent_enough(support, total, min_support)) continue;
      out.push_back({pattern, static_cast<double>(support) / static_cast<double>(total)});
      for (const auto& o : occ) {
        const auto& seq = sequences[o.seq];
        const std::size_t end = o.start + pattern.size();
        if (end >= seq.size()) continue;
        TokenList grown = pattern;
        grown.push_back(seq[end]);
        next[std::move(grown)].push_back(o);
      }
    }
    level = std::move(next);
  }
  std::stable_sort(out.begin(), out.end(), [](const Pattern& a, const Pattern& b) {
    if (a.pattern.size() != b.pattern.size()) return a.pattern.size() < b.pattern.size();
    return a.pattern < b.pattern;
  });
  return out;
}

PatternBank build_pattern_bank(std::span<const std::pair<int, TokenList>> labeled, double min_support, int max_len,
                               std::span<const int> required_classes) {
  check_support(min_support);
  std::map<int, std::vector<TokenList>> by_class;
  for (const auto& [label, seq] : labeled) by_class[label].push_back(seq);
  for (int c : required_classes) {
    if (!by_class.count(c)) throw Error("seqmine.missing_class", "no sequences for class " + std::to_string(c));
  }
  PatternBank bank;
  bank.min_support = min_support;
  bank.max_len = max_len;
  for (auto& [label, seqs] : by_class) {
    std::map<TokenList, int> modes;
    for (const auto& s : seqs) ++modes[s];
    const TokenList* best = nullptr;
    int best_count = 0;
    for (const auto& [s, c] : modes) {  // map order = lexicographic, so first max wins ties
      if (c > best_count) {
        best = &s;
        best_count = c;
      }
    }
    ClassPatterns cp;
    cp.canonical = *best;
    cp.frequent = mine_subsequences(seqs, min_support, max_len);
    cp.count = static_cast<int>(seqs.size());
    bank.classes.emplace(label, std::move(cp));
  }
  return bank;
}

double NGramModel::probability(const std::vector<int>& context, int next) const {
  std::size_t total = 0;
  double c = 0.0;
  if (auto it = counts.find(context); it != counts.end()) {
    for (const auto& [tok, n] : it->second) {
      total += static_cast<std::size_t>(n);
      if (tok == next) c = n;
    }
  }
  return (c + alpha) / (static_cast<double>(total) + alpha * outcomes());
}

NGramModel fit_ngram(std::span<const TokenList> sequences, int n, double alpha, int vocab_size) {
  if (n < 1) throw Error("seqmine.bad_order", "n-gram order must be >= 1");
  if (!(alpha > 0.0)) throw Error("seqmine.bad_alpha", "alpha must be positive");
  if (vocab_size < 1) throw Error("seqmine.bad_vocab", "vocabulary size must be positive");
  NGramModel model;
  model.order = n;
  model.vocab_size = vocab_size;
  model.alpha = alpha;
  for (const auto& seq : sequences) {
    if (seq.empty()) throw Error("seqmine.empty_sequence", "cannot fit on an empty sequence");
    std::vector<int> context(static_cast<std::size_t>(n - 1), kSoc);
    auto push = [&](int tok) {
      model.counts[context][tok] += 1.0;
      if (!context.empty()) {
        context.erase(context.begin());
        context.push_back(tok);
      }
    };
    for (int tok : seq) {
      if (tok < 0 || tok >= vocab_size) throw Error("seqmine.token_out_of_range", "token outside vocabulary");
      push(tok);
    }
    push(kEoc);
  }
  return model;
}

double score_ngram(const NGramModel& model, const TokenList& sequence) {
  if (sequence.empty()) throw Error("seqmine.empty_sequence", "cannot score an empty sequence");
  std::vector<int> context(static_cast<std::size_t>(model.order - 1), kSoc);
  double nll = 0.0;
  auto step = [&](int tok) {
    nll -= std::log(model.probability(context, tok));
    if (!context.empty()) {
      context.erase(context.begin());
      context.push_back(tok);
    }
  };
  for (int tok : sequence) step(tok);
  step(kEoc);
  return nll / static_cast<double>(sequence.size() + 1);
}

}  // namespace kseq
