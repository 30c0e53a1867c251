// SPDX-License-Identifier: Apache-2.0
#include "kseq/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>

#include "kseq/error.hpp"
#include "kseq/rng.hpp"

namespace kseq {
namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    d += t * t;
  }
  return d;
}

std::span<const double> row_of(const std::vector<double>& flat, std::size_t dim, std::size_t k) {
  return {flat.data() + k * dim, dim};
}

// Returns (index, squared distance) of the nearest centroid, lowest index on ties.
std::pair<std::size_t, double> nearest(const std::vector<double>& centroids, std::size_t count, std::size_t dim,
                                       std::span<const double> x) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < count; ++k) {
    const double d = sq_dist(x, row_of(centroids, dim, k));
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return {best, best_d};
}

void check_finite(const FeatureMatrix& f) {
  for (double v : f.values()) {
    if (!std::isfinite(v)) throw Error("clustering.non_finite", "features contain non-finite values");
  }
}

}  // namespace

ClusterModel fit_kmeans(const FeatureMatrix& features, int K, std::uint64_t seed, int max_iters, FitTrace* trace) {
  if (K < 2) throw Error("clustering.bad_k", "K must be at least 2");
  const std::size_t n = features.rows();
  const std::size_t dim = features.dim();
  const auto k_count = static_cast<std::size_t>(K);
  if (n < k_count) {
    throw Error("clustering.too_few_points", "need at least K=" + std::to_string(K) + " points, got " + std::to_string(n));
  }
  check_finite(features);

  Rng rng(seed);
  ClusterModel model;
  model.K = k_count;
  model.dim = dim;
  model.seed = seed;
  model.centroids.reserve(k_count * dim);

  // k-means++ seeding.
  std::vector<char> chosen(n, 0);
  auto add_center = [&](std::size_t i) {
    chosen[i] = 1;
    auto r = features.row(i);
    model.centroids.insert(model.centroids.end(), r.begin(), r.end());
  };
  add_center(static_cast<std::size_t>(rng.below(n)));
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(features.row(i), model.centroid(0));
  for (std::size_t k = 1; k < k_count; ++k) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (d2[i] > 0.0 && acc > target) {
          pick = i;
          break;
        }
      }
      if (pick == n) {  // rounding at the tail
        for (std::size_t i = n; i-- > 0;) {
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) {
          pick = i;
          break;
        }
      }
    }
    add_center(pick);
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(features.row(i), model.centroid(k)));
  }

  // Lloyd iterations.
  std::vector<std::size_t> labels(n, k_count);
  std::vector<double> dist(n);
  std::vector<double> sums(k_count * dim);
  std::vector<std::size_t> counts(k_count);
  int iter = 0;
  for (; iter < max_iters; ++iter) {
    bool changed = false;
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      auto [k, d] = nearest(model.centroids, k_count, dim, features.row(i));
      changed = changed || k != labels[i];
      labels[i] = k;
      dist[i] = d;
      objective += d;
    }
    if (trace) trace->objective.push_back(objective);
    if (!changed) break;

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto r = features.row(i);
      for (std::size_t j = 0; j < dim; ++j) sums[labels[i] * dim + j] += r[j];
      ++counts[labels[i]];
    }
    for (std::size_t k = 0; k < k_count; ++k) {
      if (counts[k] == 0) continue;
      for (std::size_t j = 0; j < dim; ++j) model.centroids[k * dim + j] = sums[k * dim + j] / counts[k];
    }
    for (std::size_t k = 0; k < k_count; ++k) {
      if (counts[k] != 0) continue;
      std::size_t far = 0;
      for (std::size_t i = 1; i < n; ++i)
        if (dist[i] > dist[far]) far = i;
      auto r = features.row(far);
      std::copy(r.begin(), r.end(), model.centroids.begin() + static_cast<std::ptrdiff_t>(k * dim));
      dist[far] = 0.0;
    }
  }
  if (trace) trace->iterations = iter;
  return model;
}

double kmeans_objective(const ClusterModel& model, const FeatureMatrix& features) {
  double total = 0.0;
  for (std::size_t i = 0; i < features.rows(); ++i) total += nearest(model.centroids, model.K, model.dim, features.row(i)).second;
  return total;
}

LabelField assign(const ClusterModel& model, const FeatureMatrix& features) {
  if (features.rows() > 0 && features.dim() != model.dim) {
    throw Error("clustering.dimension_mismatch", "feature dim " + std::to_string(features.dim()) +
                                                     " does not match model dim " + std::to_string(model.dim));
  }
  const auto& table = model.merged() ? model.over_centroids : model.centroids;
  const std::size_t count = model.over_count();
  LabelField field;
  field.labels.resize(features.rows());
  for (std::size_t i = 0; i < features.rows(); ++i) {
    auto [k, d] = nearest(table, count, model.dim, features.row(i));
    field.labels[i] = model.merged() ? model.merge_map[k] : static_cast<int>(k);
    field.energy += d;
  }
  return field;
}

ClusterModel overcluster_merge(const ClusterModel& model, int target_K, const FeatureMatrix& train_features) {
  if (target_K < 2) throw Error("clustering.bad_k", "target K must be at least 2");
  if (static_cast<std::size_t>(target_K) >= model.K) {
    throw Error("clustering.bad_target", "target K must be smaller than the overcluster count");
  }
  if (model.merged()) throw Error("clustering.already_merged", "model is already merged");
  if (train_features.rows() > 0 && train_features.dim() != model.dim) {
    throw Error("clustering.dimension_mismatch", "training features do not match model dim");
  }
  const std::size_t dim = model.dim;
  const std::size_t over = model.K;

  std::vector<double> members(over, 0.0);
  for (std::size_t i = 0; i < train_features.rows(); ++i) {
    members[nearest(model.centroids, over, dim, train_features.row(i)).first] += 1.0;
  }

  struct Group {
    std::vector<std::size_t> fine;
    std::vector<double> centroid;
    double weight = 0.0;
  };
  std::vector<Group> groups(over);
  for (std::size_t k = 0; k < over; ++k) {
    auto c = model.centroid(k);
    groups[k] = {{k}, {c.begin(), c.end()}, members[k]};
  }
  while (groups.size() > static_cast<std::size_t>(target_K)) {
    std::size_t ba = 0, bb = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < groups.size(); ++a) {
      for (std::size_t b = a + 1; b < groups.size(); ++b) {
        const double d = sq_dist(groups[a].centroid, groups[b].centroid);
        if (d < best) {
          best = d;
          ba = a;
          bb = b;
        }
      }
    }
    Group& A = groups[ba];
    Group& B = groups[bb];
    const double w = A.weight + B.weight;
    for (std::size_t j = 0; j < dim; ++j) {
      A.centroid[j] = w > 0.0 ? (A.centroid[j] * A.weight + B.centroid[j] * B.weight) / w
                              : 0.5 * (A.centroid[j] + B.centroid[j]);
    }
    A.weight = w;
    A.fine.insert(A.fine.end(), B.fine.begin(), B.fine.end());
    groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(bb));
  }

  ClusterModel out;
  out.K = groups.size();
  out.dim = dim;
  out.seed = model.seed;
  out.over_centroids = model.centroids;
  out.merge_map.assign(over, 0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    out.centroids.insert(out.centroids.end(), groups[g].centroid.begin(), groups[g].centroid.end());
    for (auto f : groups[g].fine) out.merge_map[f] = static_cast<int>(g);
  }
  return out;
}

ClusterModel order_clusters(const ClusterModel& model, std::optional<std::size_t> key_dim) {
  if (key_dim && *key_dim >= model.dim) throw Error("clustering.bad_key", "ordering key outside feature dims");
  std::vector<std::size_t> order(model.K);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    auto ca = model.centroid(a);
    auto cb = model.centroid(b);
    if (key_dim && ca[*key_dim] != cb[*key_dim]) return ca[*key_dim] < cb[*key_dim];
    return std::lexicographical_compare(ca.begin(), ca.end(), cb.begin(), cb.end());
  });
  std::vector<int> new_id(model.K);
  ClusterModel out = model;
  out.centroids.clear();
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    new_id[order[rank]] = static_cast<int>(rank);
    auto c = model.centroid(order[rank]);
    out.centroids.insert(out.centroids.end(), c.begin(), c.end());
  }
  for (auto& m : out.merge_map) m = new_id[static_cast<std::size_t>(m)];
  return out;
}

double unary_cost(const ClusterModel& model, std::span<const double> x, int label) {
  if (!model.merged()) return sq_dist(x, model.centroid(static_cast<std::size_t>(label)));
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < model.merge_map.size(); ++k) {
    if (model.merge_map[k] != label) continue;
    best = std::min(best, sq_dist(x, row_of(model.over_centroids, model.dim, k)));
  }
  return best;
}

namespace {

std::vector<std::vector<std::size_t>> patch_neighbours(const PatchGrid& grid) {
  Grid<int> index(grid.grid_rows, grid.grid_cols, -1);
  for (std::size_t i = 0; i < grid.patches.size(); ++i) {
    index(grid.patches[i].grid_row, grid.patches[i].grid_col) = static_cast<int>(i);
  }
  std::vector<std::vector<std::size_t>> adj(grid.patches.size());
  static constexpr int kDr[4] = {-1, 0, 0, 1};
  static constexpr int kDc[4] = {0, -1, 1, 0};
  for (std::size_t i = 0; i < grid.patches.size(); ++i) {
    for (int k = 0; k < 4; ++k) {
      const int j = index.at_or(grid.patches[i].grid_row + kDr[k], grid.patches[i].grid_col + kDc[k], -1);
      if (j >= 0) adj[i].push_back(static_cast<std::size_t>(j));
    }
  }
  return adj;
}

}  // namespace

double potts_energy(const std::vector<int>& labels, const PatchGrid& grid, const ClusterModel& model,
                    const FeatureMatrix& features, double lambda) {
  const auto adj = patch_neighbours(grid);
  double e = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    e += unary_cost(model, features.row(i), labels[i]);
    for (auto j : adj[i]) {
      if (j > i && labels[i] != labels[j]) e += lambda;
    }
  }
  return e;
}

LabelField smooth_labels(const LabelField& field, const PatchGrid& grid, const ClusterModel& model,
                         const FeatureMatrix& features, double lambda, int max_sweeps,
                         std::vector<double>* energy_trace) {
  if (field.labels.size() != grid.patches.size() || features.rows() != grid.patches.size()) {
    throw Error("clustering.misaligned", "label field, features and patch grid must align");
  }
  if (lambda < 0.0) throw Error("clustering.bad_lambda", "lambda must be non-negative");
  const std::size_t n = field.labels.size();
  const auto adj = patch_neighbours(grid);

  // Patch order is row-major by construction of extract_patches, but sort to
  // be independent of how the grid was built.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& pa = grid.patches[a];
    const auto& pb = grid.patches[b];
    return std::tie(pa.grid_row, pa.grid_col) < std::tie(pb.grid_row, pb.grid_col);
  });

  std::vector<std::vector<double>> unary(n, std::vector<double>(model.K));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < model.K; ++k) unary[i][k] = unary_cost(model, features.row(i), static_cast<int>(k));

  LabelField out{field.labels, 0.0};
  auto energy = [&] {
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      e += unary[i][static_cast<std::size_t>(out.labels[i])];
      for (auto j : adj[i])
        if (j > i && out.labels[i] != out.labels[j]) e += lambda;
    }
    return e;
  };
  if (energy_trace) energy_trace->push_back(energy());

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool changed = false;
    for (auto i : order) {
      auto local = [&](int label) {
        double e = unary[i][static_cast<std::size_t>(label)];
        for (auto j : adj[i]) e += (out.labels[j] != label) ? lambda : 0.0;
        return e;
      };
      const int current = out.labels[i];
      double best_e = local(current);
      int best = current;
      for (int k = 0; k < static_cast<int>(model.K); ++k) {
        const double e = local(k);
        if (e < best_e) {
          best_e = e;
          best = k;
        }
      }
      if (best != current) {
        out.labels[i] = best;
        changed = true;
      }
    }
    if (energy_trace) energy_trace->push_back(energy());
    if (!changed) break;
  }
  out.energy = energy();
  return out;
}

}  // namespace kseq
