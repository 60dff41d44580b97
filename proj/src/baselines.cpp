#include "nmfc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "nmfc/errors.hpp"
#include "nmfc/rng.hpp"

namespace nmfc {

namespace {

struct LloydRun {
  std::vector<int> labels;
  std::vector<double> history;
  double inertia = 0.0;
};

// Assigns every point to its nearest center (lowest index on ties), filling
// `dist` with the squared distances. Returns the inertia.
double assign(const Matrix& points, const Matrix& centers, std::vector<int>& labels,
              std::vector<double>& dist) {
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < centers.rows(); ++c) {
      const double d = (points.row(i) - centers.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
    dist[static_cast<std::size_t>(i)] = best_d;
    inertia += best_d;
  }
  return inertia;
}

Matrix plus_plus_seeding(const Matrix& points, int k, Rng& rng) {
  const Eigen::Index n = points.rows();
  Matrix centers(k, points.cols());
  centers.row(0) = points.row(static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n))));
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    d2[static_cast<std::size_t>(i)] = (points.row(i) - centers.row(0)).squaredNorm();
  }
  for (int c = 1; c < k; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    Eigen::Index pick = n - 1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double run = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        run += d2[static_cast<std::size_t>(i)];
        if (run > target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n)));
    }
    centers.row(c) = points.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) {
      d2[static_cast<std::size_t>(i)] =
          std::min(d2[static_cast<std::size_t>(i)], (points.row(i) - centers.row(c)).squaredNorm());
    }
  }
  return centers;
}

LloydRun lloyd(const Matrix& points, const KmeansOptions& options, Rng& rng) {
  const Eigen::Index n = points.rows();
  const int k = options.k;
  Matrix centers = plus_plus_seeding(points, k, rng);
  LloydRun run;
  run.labels.assign(static_cast<std::size_t>(n), 0);
  std::vector<double> dist(static_cast<std::size_t>(n));
  run.inertia = assign(points, centers, run.labels, dist);
  run.history.push_back(run.inertia);

  for (int it = 0; it < options.max_iterations; ++it) {
    Matrix next = Matrix::Zero(k, points.cols());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = run.labels[static_cast<std::size_t>(i)];
      next.row(c) += points.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        next.row(c) /= counts[static_cast<std::size_t>(c)];
        continue;
      }
      const auto far = std::max_element(dist.begin(), dist.end()) - dist.begin();
      next.row(c) = points.row(far);
      dist[static_cast<std::size_t>(far)] = -1.0;  // not reused for another empty cluster
    }
    const double movement = (next - centers).rowwise().norm().maxCoeff();
    centers = std::move(next);
    run.inertia = assign(points, centers, run.labels, dist);
    run.history.push_back(run.inertia);
    if (movement <= options.tolerance) break;
  }
  return run;
}

}  // namespace

KmeansResult kmeans(const Matrix& points, const KmeansOptions& options) {
  require_valid(points, "points");
  if (options.k < 1) throw SpecError("kmeans: K must be >= 1");
  if (options.restarts < 1) throw SpecError("kmeans: restarts must be >= 1");
  if (points.rows() < options.k) {
    throw SizeLimitError("kmeans: " + std::to_string(points.rows()) +
                         " points cannot form " + std::to_string(options.k) + " clusters");
  }
  KmeansResult best;
  bool have = false;
  for (int r = 0; r < options.restarts; ++r) {
    Rng rng(mix_seed(options.seed, static_cast<std::uint64_t>(r)));
    LloydRun run = lloyd(points, options, rng);
    if (!have || run.inertia < best.inertia) {
      best.partition = Partition(std::move(run.labels), options.k);
      best.inertia = run.inertia;
      best.inertia_history = std::move(run.history);
      best.restart = r;
      have = true;
    }
  }
  return best;
}

EigenDecomposition jacobi_eigen(const Matrix& W) {
  require_valid(W, "symmetric matrix");
  const Eigen::Index n = W.rows();
  if (W.cols() != n) throw DimensionError("jacobi_eigen: matrix must be square");
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      if (std::abs(W(i, j) - W(j, i)) > 1e-10) {
        throw DomainError("jacobi_eigen: matrix is not symmetric at (" + std::to_string(i) +
                          ", " + std::to_string(j) + ")");
      }
    }
  }
  Matrix a = 0.5 * (W + W.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double threshold = 1e-10 * W.norm();
  auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        if (i != j) s += a(i, j) * a(i, j);
      }
    }
    return std::sqrt(s);
  };

  constexpr int max_sweeps = 100;
  int sweeps = 0;
  while (off_norm() > threshold) {
    if (sweeps == max_sweeps) {
      throw ConvergenceError("jacobi_eigen: no convergence after 100 sweeps", a.diagonal());
    }
    ++sweeps;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return a(x, x) > a(y, y); });
  EigenDecomposition out{Vector(n), Matrix(n, n), sweeps};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
    out.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

Partition spectral_ratio_assoc(const Matrix& W, int K, std::uint64_t seed) {
  if (K < 1 || K > W.rows()) {
    throw SizeLimitError("spectral: K=" + std::to_string(K) + " outside [1, " +
                         std::to_string(W.rows()) + "]");
  }
  const EigenDecomposition eig = jacobi_eigen(W);
  const Matrix embedding = eig.vectors.leftCols(K);
  KmeansOptions options;
  options.k = K;
  options.seed = seed;
  return kmeans(embedding, options).partition;
}

}  // namespace nmfc
