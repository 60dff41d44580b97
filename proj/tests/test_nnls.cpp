#include <gtest/gtest.h>

#include <limits>

#include "nmfc/errors.hpp"
#include "nmfc/solvers.hpp"
#include "test_support.hpp"

namespace nmfc {
namespace {

using testing::random_matrix;

// Exhaustive support enumeration: unconstrained least squares on every
// column subset, keep the best nonnegative solution.
double enumerate_nnls(const NnlsProblem& p) {
  const auto k = p.design.cols();
  double best = 0.5 * p.target.squaredNorm();  // empty support
  for (unsigned mask = 1; mask < (1U << k); ++mask) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (mask & (1U << j)) cols.push_back(j);
    }
    Matrix sub(p.design.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = p.design.col(cols[c]);
    const Vector z = sub.colPivHouseholderQr().solve(p.target);
    if (z.minCoeff() < 0.0) continue;
    best = std::min(best, 0.5 * (p.target - sub * z).squaredNorm());
  }
  return best;
}

void expect_kkt(const NnlsProblem& p, const Vector& c) {
  const Vector g = p.design.transpose() * (p.design * c - p.target);
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    EXPECT_GE(c(i), 0.0);
    EXPECT_GE(g(i), -1e-8);
    EXPECT_LE(std::abs(c(i) * g(i)), 1e-8);
  }
}

TEST(Nnls, IdentityDesign) {
  NnlsProblem p{Matrix::Identity(2, 2), Vector(2)};
  p.target << 3, 4;
  const Vector c = nnls_solve(p);
  EXPECT_NEAR(c(0), 3.0, 1e-14);
  EXPECT_NEAR(c(1), 4.0, 1e-14);
}

TEST(Nnls, ActiveConstraint) {
  // Unconstrained LS gives c = [2/3, -1/3]; supports {0} gives 2/5, {1} gives 1/5
  // with a larger residual, so the optimum is [0.4, 0].
  NnlsProblem p{Matrix(2, 2), Vector(2)};
  p.design << 2, 1, 1, 2;
  p.target << 1, 0;
  const Vector c = nnls_solve(p);
  EXPECT_NEAR(c(0), 0.4, 1e-14);
  EXPECT_EQ(c(1), 0.0);
  EXPECT_NEAR(nnls_objective(p, c), enumerate_nnls(p), 1e-14);
}

TEST(Nnls, IdenticalColumnsSatisfyKkt) {
  NnlsProblem p{Matrix(3, 2), Vector(3)};
  p.design << 1, 1, 2, 2, 0.5, 0.5;
  p.target << 1, 3, 2;
  const Vector c = nnls_solve(p);
  expect_kkt(p, c);
  EXPECT_NEAR(nnls_objective(p, c), enumerate_nnls(p), 1e-10);
}

TEST(Nnls, MatchesSupportEnumeration) {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const auto k = static_cast<Eigen::Index>(1 + rng.index(8));
    const auto m = static_cast<Eigen::Index>(1 + rng.index(12));
    NnlsProblem p{random_matrix(m, k, rng), random_matrix(m, 1, rng, 0, 2).col(0)};
    const Vector c = nnls_solve(p);
    expect_kkt(p, c);
    EXPECT_NEAR(nnls_objective(p, c), enumerate_nnls(p), 1e-8) << "trial " << trial;
  }
}

TEST(Nnls, MixedSignDesign) {
  // Signed designs exercise the step-back loop harder than nonnegative ones.
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const auto k = static_cast<Eigen::Index>(2 + rng.index(7));
    const auto m = static_cast<Eigen::Index>(k + rng.index(6));
    NnlsProblem p{random_matrix(m, k, rng, -1, 1), random_matrix(m, 1, rng, 0, 1).col(0)};
    const Vector c = nnls_solve(p);
    expect_kkt(p, c);
    EXPECT_NEAR(nnls_objective(p, c), enumerate_nnls(p), 1e-8) << "trial " << trial;
  }
}

TEST(Nnls, Errors) {
  NnlsProblem bad{Matrix::Ones(3, 2), Vector::Ones(2)};
  EXPECT_THROW(nnls_solve(bad), DimensionError);
  NnlsProblem nan{Matrix::Ones(2, 2), Vector::Ones(2)};
  nan.design(0, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(nnls_solve(nan), DomainError);
}

TEST(Nnls, SwapBudgetIsReported) {
  Matrix G = Matrix::Identity(3, 3);
  Vector r(3);
  r << 1, 2, 3;
  const NnlsResult capped = nnls_gram(G, r, 1);
  EXPECT_FALSE(capped.converged);
  EXPECT_GE(capped.solution.minCoeff(), 0.0);
  const NnlsResult full = nnls_gram(G, r);
  EXPECT_TRUE(full.converged);
  EXPECT_EQ(full.swaps, 3);
}

}  // namespace
}  // namespace nmfc
