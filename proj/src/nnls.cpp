#include <algorithm>
#include <limits>
#include <vector>

#include "nmfc/errors.hpp"
#include "nmfc/solvers.hpp"

namespace nmfc {

namespace {

// Solves G_PP z_P = r_P on the passive set; entries outside P are zero.
Vector solve_passive(const Matrix& gram, const Vector& rhs,
                     const std::vector<char>& passive) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(passive.size()); ++i) {
    if (passive[i]) idx.push_back(i);
  }
  const auto p = static_cast<Eigen::Index>(idx.size());
  Matrix sub(p, p);
  Vector sub_rhs(p);
  for (Eigen::Index a = 0; a < p; ++a) {
    sub_rhs(a) = rhs(idx[a]);
    for (Eigen::Index b = 0; b < p; ++b) sub(a, b) = gram(idx[a], idx[b]);
  }
  const Vector sub_z = sub.ldlt().solve(sub_rhs);
  Vector z = Vector::Zero(rhs.size());
  for (Eigen::Index a = 0; a < p; ++a) z(idx[a]) = sub_z(a);
  return z;
}

}  // namespace

NnlsResult nnls_gram(const Matrix& gram, const Vector& rhs, int max_swaps) {
  const Eigen::Index k = rhs.size();
  if (gram.rows() != k || gram.cols() != k) {
    throw DimensionError("nnls: gram matrix does not match rhs length");
  }
  NnlsResult result{Vector::Zero(k), 0, true};
  if (k == 0) return result;
  if (max_swaps <= 0) max_swaps = static_cast<int>(3 * k);

  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double gram_scale = gram.cwiseAbs().maxCoeff();
  const double rhs_scale = rhs.cwiseAbs().maxCoeff();

  Vector& x = result.solution;
  std::vector<char> passive(k, 0);
  // Columns that were rejected immediately after entering; retried only
  // once x moves again.
  std::vector<char> rejected(k, 0);
  Vector w = rhs;

  while (true) {
    const double tol = 1e3 * eps * (rhs_scale + gram_scale * std::max(1.0, x.cwiseAbs().maxCoeff()));
    Eigen::Index enter = -1;
    double best = tol;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (!passive[j] && !rejected[j] && w(j) > best) {
        best = w(j);
        enter = j;
      }
    }
    if (enter < 0) break;
    if (result.swaps >= max_swaps) {
      result.converged = false;
      break;
    }
    passive[enter] = 1;
    ++result.swaps;

    while (true) {
      const Vector z = solve_passive(gram, rhs, passive);
      Eigen::Index blocking = -1;
      double alpha = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < k; ++i) {
        if (passive[i] && z(i) <= 0.0) {
          const double step = x(i) / (x(i) - z(i));
          if (step < alpha) {
            alpha = step;
            blocking = i;
          }
        }
      }
      if (blocking < 0) {
        x = z;
        break;
      }
      x += alpha * (z - x);
      x(blocking) = 0.0;
      for (Eigen::Index i = 0; i < k; ++i) {
        if (passive[i] && x(i) <= 0.0) {
          x(i) = 0.0;
          passive[i] = 0;
        }
      }
    }

    if (!passive[enter]) {
      rejected[enter] = 1;
    } else {
      std::fill(rejected.begin(), rejected.end(), 0);
    }
    w = rhs - gram * x;
  }
  return result;
}

Vector nnls_solve(const NnlsProblem& problem) {
  const Matrix& design = problem.design;
  const Vector& target = problem.target;
  if (design.rows() != target.size()) {
    throw DimensionError("nnls: design has " + std::to_string(design.rows()) +
                         " rows but target has " + std::to_string(target.size()));
  }
  if (!design.allFinite() || !target.allFinite()) {
    throw DomainError("nnls: non-finite input");
  }
  const Matrix gram = design.transpose() * design;
  const Vector rhs = design.transpose() * target;
  NnlsResult result = nnls_gram(gram, rhs);
  if (!result.converged) {
    throw ConvergenceError("nnls: active-set swap limit (" +
                               std::to_string(3 * design.cols()) + ") exceeded",
                           std::move(result.solution));
  }
  return result.solution;
}

double nnls_objective(const NnlsProblem& problem, const Vector& c) {
  return 0.5 * (problem.target - problem.design * c).squaredNorm();
}

}  // namespace nmfc
