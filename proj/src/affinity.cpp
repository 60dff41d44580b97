#include "nmfc/affinity.hpp"

#include <cmath>
#include <string>

#include "nmfc/errors.hpp"

namespace nmfc {

std::string_view to_string(AffinityKind kind) {
  switch (kind) {
    case AffinityKind::item: return "item";
    case AffinityKind::feature: return "feature";
    case AffinityKind::undirected: return "undirected";
    case AffinityKind::symmetrized_directed: return "symmetrized-directed";
  }
  return "undirected";
}

namespace {

// Gram matrix of the columns of X, with exact symmetry.
Matrix symmetric_gram(const Matrix& X) {
  const Eigen::Index n = X.cols();
  Matrix G(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double v = X.col(i).dot(X.col(j));
      G(i, j) = v;
      G(j, i) = v;
    }
  }
  return G;
}

void require_square(const Matrix& V, std::string_view what) {
  if (V.rows() != V.cols()) {
    throw DimensionError(std::string(what) + " must be square, got " +
                         std::to_string(V.rows()) + "x" + std::to_string(V.cols()));
  }
}

}  // namespace

AffinityMatrix item_affinity(const Matrix& A) {
  require_nonnegative(A, "data matrix");
  return {symmetric_gram(A), AffinityKind::item};
}

AffinityMatrix feature_affinity(const Matrix& A) {
  require_nonnegative(A, "data matrix");
  return {symmetric_gram(A.transpose()), AffinityKind::feature};
}

AffinityMatrix symmetrize(const Matrix& V) {
  require_square(V, "directed affinity");
  require_nonnegative(V, "directed affinity");
  const Eigen::Index n = V.rows();
  Matrix S(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double v = V(i, j) + V(j, i);
      S(i, j) = v;
      S(j, i) = v;
    }
  }
  return {std::move(S), AffinityKind::symmetrized_directed};
}

AffinityMatrix undirected_affinity(const Matrix& W) {
  require_square(W, "affinity");
  require_nonnegative(W, "affinity");
  for (Eigen::Index j = 0; j < W.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      if (std::abs(W(i, j) - W(j, i)) > 1e-10) {
        throw DomainError("affinity is not symmetric at (" + std::to_string(i) +
                          ", " + std::to_string(j) + ")");
      }
    }
  }
  return {W, AffinityKind::undirected};
}

}  // namespace nmfc
