#pragma once

#include <cstdint>
#include <vector>

#include "nmfc/metrics.hpp"
#include "nmfc/model.hpp"

namespace nmfc {

struct KmeansOptions {
  int k = 2;
  int max_iterations = 100;
  std::uint64_t seed = 0;
  int restarts = 10;
  double tolerance = 1e-8;  // largest center movement (Euclidean)
};

struct KmeansResult {
  Partition partition;
  double inertia = 0.0;
  /// Inertia after every assignment step of the winning restart.
  std::vector<double> inertia_history;
  int restart = 0;
};

/// Lloyd iteration with k-means++ seeding; rows of `points` are the points.
/// Empty clusters are re-seeded at the point farthest from its center.
/// The best restart by inertia wins, lowest index on ties.
KmeansResult kmeans(const Matrix& points, const KmeansOptions& options);

struct EigenDecomposition {
  Vector values;   // descending
  Matrix vectors;  // columns, matching `values`
  int sweeps = 0;
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops to
/// 1e-10 ||W||_F. Throws DomainError when W is asymmetric beyond 1e-10.
EigenDecomposition jacobi_eigen(const Matrix& W);

/// Ratio-association spectral relaxation: rows of the top-K eigenvectors of
/// W clustered by k-means (10 restarts).
Partition spectral_ratio_assoc(const Matrix& W, int K, std::uint64_t seed);

}  // namespace nmfc
