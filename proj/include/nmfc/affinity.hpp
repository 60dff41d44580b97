#pragma once

#include <string_view>

#include "nmfc/model.hpp"

namespace nmfc {

enum class AffinityKind { item, feature, undirected, symmetrized_directed };

std::string_view to_string(AffinityKind kind);

/// Square, symmetric, nonnegative similarity matrix.
struct AffinityMatrix {
  Matrix matrix;
  AffinityKind kind = AffinityKind::undirected;

  Eigen::Index size() const { return matrix.rows(); }
};

/// A^T A (N x N). Upper triangle computed once and mirrored, so the result is
/// exactly symmetric.
AffinityMatrix item_affinity(const Matrix& A);

/// A A^T (M x M).
AffinityMatrix feature_affinity(const Matrix& A);

/// V + V^T for a directed graph. No halving: a symmetric input comes back
/// doubled.
AffinityMatrix symmetrize(const Matrix& V);

/// Wraps an undirected weight matrix; requires square, nonnegative and
/// symmetric within 1e-10 per entry.
AffinityMatrix undirected_affinity(const Matrix& W);

}  // namespace nmfc
