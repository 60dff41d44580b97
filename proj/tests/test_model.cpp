#include <gtest/gtest.h>

#include "nmfc/errors.hpp"
#include "nmfc/metrics.hpp"
#include "nmfc/model.hpp"
#include "test_support.hpp"

namespace nmfc {
namespace {

using testing::random_matrix;

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

TEST(FrobeniusObjective, ExactFactorizationIsZero) {
  const Matrix B = random_matrix(5, 2, 1);
  const Matrix C = random_matrix(2, 4, 2);
  EXPECT_EQ(frobenius_objective(B * C, B, C), 0.0);
}

TEST(FrobeniusObjective, SmallCases) {
  EXPECT_DOUBLE_EQ(frobenius_objective(mat({{1, 0}, {0, 1}}), mat({{1}, {0}}), mat({{1, 0}})), 0.5);
  EXPECT_DOUBLE_EQ(frobenius_objective(mat({{2}}), mat({{1}}), mat({{1}})), 0.5);
}

TEST(FrobeniusObjective, ShapeMismatchThrows) {
  EXPECT_THROW(frobenius_objective(Matrix::Ones(3, 3), Matrix::Ones(3, 2), Matrix::Ones(3, 3)),
               DimensionError);
  EXPECT_THROW(basis_gradient(Matrix::Ones(3, 3), Matrix::Ones(2, 2), Matrix::Ones(2, 3)),
               DimensionError);
  EXPECT_THROW(kkt_residual(Matrix::Ones(3, 3), Matrix::Ones(3, 2), Matrix::Ones(2, 4)),
               DimensionError);
}

TEST(FrobeniusObjective, InvariantUnderDiagonalRescaling) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix A = random_matrix(6, 5, rng, 0, 2);
    const Matrix B = random_matrix(6, 3, rng, 0, 2);
    const Matrix C = random_matrix(3, 5, rng, 0, 2);
    Vector d(3);
    for (int k = 0; k < 3; ++k) d(k) = rng.uniform(0.1, 10.0);
    const Matrix B2 = B * d.cwiseInverse().asDiagonal();
    const Matrix C2 = d.asDiagonal() * C;
    EXPECT_LE(testing::relative_gap(frobenius_objective(A, B, C), frobenius_objective(A, B2, C2)),
              1e-10);
  }
}

TEST(Gradient, SmallCases) {
  EXPECT_DOUBLE_EQ(basis_gradient(mat({{1}}), mat({{0}}), mat({{1}}))(0, 0), -1.0);
  const Matrix B = random_matrix(4, 2, 3);
  const Matrix C = random_matrix(2, 3, 4);
  EXPECT_EQ(basis_gradient(B * C, B, C).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(coefficient_gradient(B * C, B, C).cwiseAbs().maxCoeff(), 0.0);
}

// Central differences of the objective; independent of the closed form.
Matrix finite_difference(const Matrix& A, Matrix B, Matrix C, bool wrt_basis, double h) {
  Matrix& X = wrt_basis ? B : C;
  Matrix grad(X.rows(), X.cols());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      const double keep = X(i, j);
      X(i, j) = keep + h;
      const double up = frobenius_objective(A, B, C);
      X(i, j) = keep - h;
      const double down = frobenius_objective(A, B, C);
      X(i, j) = keep;
      grad(i, j) = (up - down) / (2 * h);
    }
  }
  return grad;
}

TEST(Gradient, MatchesFiniteDifferences) {
  Rng rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    const Matrix A = random_matrix(4, 3, rng, 0, 2);
    const Matrix B = random_matrix(4, 2, rng, 0, 2);
    const Matrix C = random_matrix(2, 3, rng, 0, 2);
    EXPECT_LE((basis_gradient(A, B, C) - finite_difference(A, B, C, true, 1e-5)).cwiseAbs().maxCoeff(),
              1e-6);
    EXPECT_LE(
        (coefficient_gradient(A, B, C) - finite_difference(A, B, C, false, 1e-5)).cwiseAbs().maxCoeff(),
        1e-6);
  }
}

TEST(KktResidual, StationaryPositivePointIsZero) {
  const auto r = kkt_residual(mat({{1}}), mat({{1}}), mat({{1}}));
  EXPECT_EQ(r.basis, 0.0);
  EXPECT_EQ(r.coefficients, 0.0);

  const Matrix B = random_matrix(5, 2, 7, 0.5, 1.0);
  const Matrix C = random_matrix(2, 6, 8, 0.5, 1.0);
  const auto exact = kkt_residual(B * C, B, C);
  EXPECT_EQ(exact.basis, 0.0);
  EXPECT_EQ(exact.coefficients, 0.0);
}

TEST(KktResidual, ScalarOffStationary) {
  // grad_B = (2-1)*1 = 1 -> min(2, 1) = 1; grad_C = 2*(2-1) = 2 -> min(1, 2) = 1.
  const auto r = kkt_residual(mat({{1}}), mat({{2}}), mat({{1}}));
  EXPECT_DOUBLE_EQ(r.basis, 1.0);
  EXPECT_DOUBLE_EQ(r.coefficients, 1.0);
}

TEST(KktResidual, ZeroEntryWithPositiveGradientContributesNothing) {
  // BC = 1 against A = 0: grad_B = [1, 1]. The zero entry gives min(0, 1) = 0,
  // the positive one min(1, 1) = 1.
  const Matrix A = Matrix::Zero(1, 1);
  const Matrix B = mat({{0, 1}});
  const Matrix C = mat({{1}, {1}});
  const Matrix grad = basis_gradient(A, B, C);
  ASSERT_GT(grad(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(kkt_residual(A, B, C).basis, 1.0);
}

TEST(NormalizeFactors, Examples) {
  const auto nf = normalize_factors(mat({{3}, {4}}), mat({{2}}));
  EXPECT_DOUBLE_EQ(nf.basis(0, 0), 0.6);
  EXPECT_DOUBLE_EQ(nf.basis(1, 0), 0.8);
  EXPECT_DOUBLE_EQ(nf.coefficients(0, 0), 10.0);

  const Matrix unit = mat({{1, 0}, {0, 1}});
  const Matrix C = mat({{1, 2}, {3, 4}});
  const auto same = normalize_factors(unit, C);
  EXPECT_EQ(same.basis, unit);
  EXPECT_EQ(same.coefficients, C);
}

TEST(NormalizeFactors, ZeroColumnNamesIndex) {
  try {
    normalize_factors(mat({{1, 0}, {2, 0}}), mat({{1}, {1}}));
    FAIL() << "expected DegenerateError";
  } catch (const DegenerateError& e) {
    EXPECT_EQ(e.index(), 1);
  }
}

TEST(NormalizeFactors, PreservesProductAndAssignments) {
  Rng rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix B = random_matrix(7, 3, rng, 0.01, 2);
    const Matrix C = random_matrix(3, 9, rng, 0.01, 2);
    const auto nf = normalize_factors(B, C);
    EXPECT_LE((nf.basis * nf.coefficients - B * C).cwiseAbs().maxCoeff(), 1e-12);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(nf.basis.col(k).norm(), 1.0, 1e-15);

    Vector d(3);
    for (int k = 0; k < 3; ++k) d(k) = rng.uniform(0.1, 10.0);
    const auto scaled =
        normalize_factors(B * d.cwiseInverse().asDiagonal(), d.asDiagonal() * C);
    EXPECT_EQ(assign_items(nf.coefficients).labels, assign_items(scaled.coefficients).labels);
  }
}

TEST(OffDiagonalEnergy, IdentityAndOnes) {
  EXPECT_EQ(off_diagonal_energy(Matrix::Identity(3, 3), Axis::columns), 0.0);
  EXPECT_DOUBLE_EQ(off_diagonal_energy(Matrix::Ones(2, 2), Axis::columns), 8.0);
  EXPECT_DOUBLE_EQ(off_diagonal_energy(Matrix::Ones(2, 3), Axis::rows), 18.0);
}

TEST(Validation, NegativeEntryNamesCoordinate) {
  Matrix A = Matrix::Ones(3, 3);
  A(2, 1) = -0.5;
  try {
    require_nonnegative(A, "A");
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("(2, 1)"), std::string::npos);
  }
  A(2, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(require_nonnegative(A, "A"), DomainError);
}

}  // namespace
}  // namespace nmfc
