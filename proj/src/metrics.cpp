#include "nmfc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nmfc/errors.hpp"

namespace nmfc {

Partition::Partition(std::vector<int> labels_in, int k_in)
    : labels(std::move(labels_in)), k(k_in) {
  if (k < 1) throw SpecError("partition needs k >= 1");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= k) {
      throw SpecError("label " + std::to_string(labels[i]) + " at position " +
                      std::to_string(i) + " outside [0, " + std::to_string(k) + ")");
    }
  }
}

std::vector<std::size_t> Partition::cluster_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int label : labels) ++sizes[static_cast<std::size_t>(label)];
  return sizes;
}

bool Partition::has_empty_clusters() const {
  const auto sizes = cluster_sizes();
  return std::find(sizes.begin(), sizes.end(), 0U) != sizes.end();
}

Partition contiguous_partition(std::size_t n, int k) {
  if (k < 1 || static_cast<std::size_t>(k) > n) {
    throw SpecError("cannot split " + std::to_string(n) + " elements into " +
                    std::to_string(k) + " groups");
  }
  const std::size_t base = n / static_cast<std::size_t>(k);
  const std::size_t extra = n % static_cast<std::size_t>(k);
  std::vector<int> labels;
  labels.reserve(n);
  for (int g = 0; g < k; ++g) {
    const std::size_t size = base + (static_cast<std::size_t>(g) < extra ? 1 : 0);
    labels.insert(labels.end(), size, g);
  }
  return Partition(std::move(labels), k);
}

namespace {

template <typename Column>
int argmax_lowest(const Column& v) {
  int best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = static_cast<int>(i);
  }
  return best;
}

}  // namespace

Partition assign_items(const Matrix& C, bool zero_to_first) {
  require_nonnegative(C, "coefficient matrix");
  std::vector<int> labels(static_cast<std::size_t>(C.cols()));
  for (Eigen::Index n = 0; n < C.cols(); ++n) {
    if (C.col(n).maxCoeff() == 0.0 && !zero_to_first) {
      throw UnassignedError("item " + std::to_string(n) + " has an all-zero coefficient column", n);
    }
    labels[static_cast<std::size_t>(n)] = argmax_lowest(C.col(n));
  }
  return Partition(std::move(labels), static_cast<int>(C.rows()));
}

Partition assign_features(const Matrix& B, bool zero_to_first) {
  require_nonnegative(B, "basis matrix");
  std::vector<int> labels(static_cast<std::size_t>(B.rows()));
  for (Eigen::Index m = 0; m < B.rows(); ++m) {
    if (B.row(m).maxCoeff() == 0.0 && !zero_to_first) {
      throw UnassignedError("feature " + std::to_string(m) + " has an all-zero basis row", m);
    }
    labels[static_cast<std::size_t>(m)] = argmax_lowest(B.row(m).transpose());
  }
  return Partition(std::move(labels), static_cast<int>(B.cols()));
}

double ratio_association(const Matrix& W, const Partition& partition) {
  const auto n = static_cast<Eigen::Index>(partition.size());
  if (W.rows() != W.cols() || W.rows() != n) {
    throw DimensionError("ratio association: affinity is " + std::to_string(W.rows()) +
                         "x" + std::to_string(W.cols()) + " but partition has " +
                         std::to_string(n) + " labels");
  }
  std::vector<double> within(static_cast<std::size_t>(partition.k), 0.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    const int lj = partition.labels[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < n; ++i) {
      if (partition.labels[static_cast<std::size_t>(i)] == lj) {
        within[static_cast<std::size_t>(lj)] += W(i, j);
      }
    }
  }
  const auto sizes = partition.cluster_sizes();
  double value = 0.0;
  for (std::size_t c = 0; c < within.size(); ++c) {
    if (sizes[c] > 0) value += within[c] / static_cast<double>(sizes[c]);
  }
  return value;
}

namespace {

class RatioAssocSearch {
 public:
  RatioAssocSearch(const Matrix& W, int K)
      : W_(W),
        n_(static_cast<int>(W.rows())),
        K_(K),
        labels_(static_cast<std::size_t>(n_), 0),
        within_(static_cast<std::size_t>(K), 0.0),
        sizes_(static_cast<std::size_t>(K), 0) {}

  OptimalPartition run() {
    descend(0, 0);
    return {Partition(best_labels_, K_), best_};
  }

 private:
  void descend(int i, int used) {
    if (i == n_) {
      double value = 0.0;
      for (int c = 0; c < used; ++c) {
        value += within_[static_cast<std::size_t>(c)] / sizes_[static_cast<std::size_t>(c)];
      }
      // Strictly better only; earlier (lexicographically smaller) labelings
      // win near-ties.
      if (best_labels_.empty() || value > best_ + 1e-12 * std::max(1.0, std::abs(best_))) {
        best_ = value;
        best_labels_ = labels_;
      }
      return;
    }
    const int limit = std::min(used + 1, K_);
    for (int c = 0; c < limit; ++c) {
      double delta = W_(i, i);
      for (int j = 0; j < i; ++j) {
        if (labels_[static_cast<std::size_t>(j)] == c) delta += W_(i, j) + W_(j, i);
      }
      labels_[static_cast<std::size_t>(i)] = c;
      within_[static_cast<std::size_t>(c)] += delta;
      ++sizes_[static_cast<std::size_t>(c)];
      descend(i + 1, std::max(used, c + 1));
      --sizes_[static_cast<std::size_t>(c)];
      within_[static_cast<std::size_t>(c)] -= delta;
    }
  }

  const Matrix& W_;
  int n_;
  int K_;
  std::vector<int> labels_;
  std::vector<double> within_;
  std::vector<int> sizes_;
  std::vector<int> best_labels_;
  double best_ = 0.0;
};

}  // namespace

OptimalPartition brute_force_ratio_assoc(const Matrix& W, int K) {
  if (W.rows() != W.cols()) throw DimensionError("affinity must be square");
  if (W.rows() > 12) {
    throw SizeLimitError("brute-force ratio association limited to 12 vertices, got " +
                         std::to_string(W.rows()));
  }
  if (W.rows() < 1) throw DimensionError("affinity is empty");
  if (K < 1) throw SpecError("K must be >= 1");
  if (!W.allFinite()) throw DomainError("affinity contains non-finite entries");
  return RatioAssocSearch(W, K).run();
}

OrthogonalityDeviation orthogonality_deviation(const Matrix& F, Axis axis) {
  const Matrix gram = axis_gram(F, axis);
  const Eigen::Index count = gram.rows();
  for (Eigen::Index i = 0; i < count; ++i) {
    if (gram(i, i) == 0.0) {
      throw DegenerateError(std::string(axis == Axis::columns ? "column " : "row ") +
                                std::to_string(i) + " is zero",
                            i);
    }
  }
  OrthogonalityDeviation out;
  double cos2 = 0.0;
  for (Eigen::Index j = 0; j < count; ++j) {
    for (Eigen::Index i = 0; i < count; ++i) {
      if (i == j) continue;
      const double g = gram(i, j);
      out.energy += g * g;
      cos2 += (g / gram(i, i)) * (g / gram(j, j));
    }
  }
  if (count > 1) out.normalized = cos2 / static_cast<double>(count * (count - 1));
  return out;
}

std::vector<int> max_weight_matching(const Matrix& weights) {
  // Hungarian algorithm with potentials on cost = max - weight, 1-based.
  const auto n = static_cast<int>(weights.rows());
  if (weights.cols() != n) throw DimensionError("matching needs a square matrix");
  if (n == 0) return {};
  const double top = weights.maxCoeff();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = (top - weights(i0 - 1, j - 1)) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(static_cast<std::size_t>(n), 0);
  for (int j = 1; j <= n; ++j) assignment[static_cast<std::size_t>(match[j] - 1)] = j - 1;
  return assignment;
}

namespace {

Matrix confusion(const Partition& a, const Partition& b, int size) {
  Matrix table = Matrix::Zero(size, size);
  for (std::size_t i = 0; i < a.size(); ++i) table(a.labels[i], b.labels[i]) += 1.0;
  return table;
}

void require_same_length(const Partition& a, const Partition& b) {
  if (a.size() != b.size()) {
    throw DimensionError("partitions have different lengths (" + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + ")");
  }
  if (a.size() == 0) throw DimensionError("partitions are empty");
}

}  // namespace

double cluster_accuracy(const Partition& predicted, const Partition& truth) {
  require_same_length(predicted, truth);
  if (predicted.k > 64 || truth.k > 64) {
    throw SizeLimitError("cluster accuracy supports at most 64 clusters");
  }
  const int size = std::max(predicted.k, truth.k);
  const Matrix table = confusion(predicted, truth, size);
  const auto assignment = max_weight_matching(table);
  double matched = 0.0;
  for (int r = 0; r < size; ++r) matched += table(r, assignment[static_cast<std::size_t>(r)]);
  return matched / static_cast<double>(predicted.size());
}

double nmi(const Partition& predicted, const Partition& truth) {
  require_same_length(predicted, truth);
  const int size = std::max(predicted.k, truth.k);
  const Matrix joint = confusion(predicted, truth, size) / static_cast<double>(predicted.size());
  const Vector pa = joint.rowwise().sum();
  const Vector pb = joint.colwise().sum().transpose();
  auto entropy = [](const Vector& p) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (p(i) > 0.0) h -= p(i) * std::log(p(i));
    }
    return h;
  };
  const double ha = entropy(pa);
  const double hb = entropy(pb);
  if (ha + hb == 0.0) return 1.0;  // both single-cluster: identical
  double mutual = 0.0;
  for (Eigen::Index j = 0; j < joint.cols(); ++j) {
    for (Eigen::Index i = 0; i < joint.rows(); ++i) {
      const double p = joint(i, j);
      if (p > 0.0) mutual += p * std::log(p / (pa(i) * pb(j)));
    }
  }
  return std::clamp(mutual / (0.5 * (ha + hb)), 0.0, 1.0);
}

}  // namespace nmfc
