// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kseq/features.hpp"

namespace kseq {

/// Token vocabulary: K centroids in feature space. After overclustering,
/// `over_centroids` keeps the K_over fine centroids and `merge_map` sends
/// each fine id to its final id.
struct ClusterModel {
  std::size_t K = 0;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  std::vector<double> centroids;       // K * dim
  std::vector<double> over_centroids;  // K_over * dim, empty without merge
  std::vector<int> merge_map;          // size K_over, empty without merge

  std::span<const double> centroid(std::size_t k) const { return {centroids.data() + k * dim, dim}; }
  bool merged() const noexcept { return !merge_map.empty(); }
  std::size_t over_count() const noexcept { return merged() ? merge_map.size() : K; }

  friend bool operator==(const ClusterModel&, const ClusterModel&) = default;
};

struct LabelField {
  std::vector<int> labels;
  double energy = 0.0;
};

/// Objective after every assignment step of a fit.
struct FitTrace {
  std::vector<double> objective;
  int iterations = 0;
};

inline constexpr int kDefaultMaxIters = 100;

/// k-means++ seeding then Lloyd iterations to an assignment fixpoint.
/// Empty clusters are re-seeded to the point farthest from its centroid
/// (lowest index on ties).
ClusterModel fit_kmeans(const FeatureMatrix& features, int K, std::uint64_t seed,
                        int max_iters = kDefaultMaxIters, FitTrace* trace = nullptr);

/// Sum of squared distances of every row to its nearest centroid.
double kmeans_objective(const ClusterModel& model, const FeatureMatrix& features);

/// Nearest-centroid labels (lowest index on ties), mapped through merge_map.
/// The energy field holds the pure data term.
LabelField assign(const ClusterModel& model, const FeatureMatrix& features);

/// Agglomerates the closest pair of centroids until target_K remain; merged
/// centroids are member-weighted means over `train_features`.
ClusterModel overcluster_merge(const ClusterModel& model, int target_K, const FeatureMatrix& train_features);

/// Relabels final clusters in ascending order of centroid component
/// `key_dim` (ties by full lexicographic order), or lexicographic order when
/// no key is given.
ClusterModel order_clusters(const ClusterModel& model, std::optional<std::size_t> key_dim);

/// Data cost of giving label `label` to a feature row: squared distance to
/// the nearest fine centroid that maps to `label`.
double unary_cost(const ClusterModel& model, std::span<const double> x, int label);

/// Potts energy: sum of unary costs + lambda * number of disagreeing
/// 4-neighbour patch pairs.
double potts_energy(const std::vector<int>& labels, const PatchGrid& grid, const ClusterModel& model,
                    const FeatureMatrix& features, double lambda);

inline constexpr int kDefaultMaxSweeps = 10;

/// Iterated conditional modes over the patch grid (row-major sweeps). A patch
/// moves only to a label with strictly lower local energy, lowest id first.
LabelField smooth_labels(const LabelField& field, const PatchGrid& grid, const ClusterModel& model,
                         const FeatureMatrix& features, double lambda, int max_sweeps = kDefaultMaxSweeps,
                         std::vector<double>* energy_trace = nullptr);

}  // namespace kseq
