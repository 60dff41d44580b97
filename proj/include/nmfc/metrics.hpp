#pragma once

#include <cstddef>
#include <vector>

#include "nmfc/affinity.hpp"
#include "nmfc/model.hpp"

namespace nmfc {

/// Hard clustering: one label in [0, k) per element.
struct Partition {
  std::vector<int> labels;
  int k = 1;

  Partition() = default;
  /// Throws SpecError unless k >= 1 and every label lies in [0, k).
  Partition(std::vector<int> labels, int k);

  std::size_t size() const { return labels.size(); }
  std::vector<std::size_t> cluster_sizes() const;
  bool has_empty_clusters() const;

  friend bool operator==(const Partition&, const Partition&) = default;
};

/// Contiguous split of n elements into k groups, earlier groups larger on
/// the remainder: n=7, k=3 gives sizes 3, 2, 2.
Partition contiguous_partition(std::size_t n, int k);

/// Item n goes to argmax_k C(k, n), lowest k on ties. An all-zero column
/// throws UnassignedError unless `zero_to_first` maps it to cluster 0.
/// Callers are expected to pass normalized factors.
Partition assign_items(const Matrix& C, bool zero_to_first = false);

/// Feature m goes to argmax_k B(m, k).
Partition assign_features(const Matrix& B, bool zero_to_first = false);

/// sum_k (sum_{i,j in cluster k} W_ij) / |cluster k|. Empty clusters add 0.
double ratio_association(const Matrix& W, const Partition& partition);
inline double ratio_association(const AffinityMatrix& W, const Partition& partition) {
  return ratio_association(W.matrix, partition);
}

struct OptimalPartition {
  Partition partition;
  double value = 0.0;
};

/// Exhaustive maximiser of ratio association over partitions with at most K
/// clusters. Labelings are enumerated canonically (first appearance order),
/// so ties resolve to the lexicographically smallest label sequence.
/// Throws SizeLimitError above 12 vertices.
OptimalPartition brute_force_ratio_assoc(const Matrix& W, int K);
inline OptimalPartition brute_force_ratio_assoc(const AffinityMatrix& W, int K) {
  return brute_force_ratio_assoc(W.matrix, K);
}

struct OrthogonalityDeviation {
  double energy = 0.0;      // sum_{i != j} (f_i . f_j)^2
  double normalized = 0.0;  // mean_{i != j} cos^2(f_i, f_j), in [0, 1]
};

/// Off-diagonal Gram energy along the requested axis (columns of B, rows of
/// C). Throws DegenerateError naming the first zero vector.
OrthogonalityDeviation orthogonality_deviation(const Matrix& F, Axis axis);

/// Fraction of elements correctly labelled under the best one-to-one
/// matching of predicted to true clusters (Hungarian algorithm).
double cluster_accuracy(const Partition& predicted, const Partition& truth);

/// Normalized mutual information, arithmetic-mean normalization.
double nmi(const Partition& predicted, const Partition& truth);

/// Maximum-weight perfect matching on a square weight matrix; returns the
/// column assigned to each row.
std::vector<int> max_weight_matching(const Matrix& weights);

}  // namespace nmfc
