#include "nmfc/model.hpp"

#include <cmath>
#include <string>

#include "nmfc/errors.hpp"

namespace nmfc {

namespace {

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

void require_valid(const Matrix& m, std::string_view what) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw DimensionError(std::string(what) + " is empty (" + shape(m) + ")");
  }
  if (!m.allFinite()) {
    throw DomainError(std::string(what) + " contains non-finite entries");
  }
}

void require_nonnegative(const Matrix& m, std::string_view what) {
  require_valid(m, what);
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (m(i, j) < 0.0) {
        throw DomainError(std::string(what) + " has negative entry " +
                          std::to_string(m(i, j)) + " at (" + std::to_string(i) +
                          ", " + std::to_string(j) + ")");
      }
    }
  }
}

void require_conforming(const Matrix& A, const Matrix& B, const Matrix& C) {
  if (B.rows() != A.rows() || C.cols() != A.cols() || B.cols() != C.rows()) {
    throw DimensionError("non-conforming shapes: A " + shape(A) + ", B " +
                         shape(B) + ", C " + shape(C));
  }
}

double frobenius_objective(const Matrix& A, const Matrix& B, const Matrix& C) {
  require_conforming(A, B, C);
  return 0.5 * (A - B * C).squaredNorm();
}

Matrix basis_gradient(const Matrix& A, const Matrix& B, const Matrix& C) {
  require_conforming(A, B, C);
  return (B * C - A) * C.transpose();
}

Matrix coefficient_gradient(const Matrix& A, const Matrix& B, const Matrix& C) {
  require_conforming(A, B, C);
  return B.transpose() * (B * C - A);
}

KktResidual kkt_residual(const Matrix& A, const Matrix& B, const Matrix& C) {
  require_conforming(A, B, C);
  const Matrix residual = B * C - A;
  const Matrix grad_b = residual * C.transpose();
  const Matrix grad_c = B.transpose() * residual;
  return {B.cwiseMin(grad_b).norm(), C.cwiseMin(grad_c).norm()};
}

NormalizedFactors normalize_factors(const Matrix& B, const Matrix& C) {
  if (B.cols() != C.rows()) {
    throw DimensionError("factor ranks differ: B " + shape(B) + ", C " + shape(C));
  }
  NormalizedFactors out{B, C, Vector(B.cols())};
  for (Eigen::Index k = 0; k < B.cols(); ++k) {
    const double norm = B.col(k).norm();
    if (norm == 0.0) {
      throw DegenerateError("basis column " + std::to_string(k) + " is zero", k);
    }
    out.scales(k) = norm;
    out.basis.col(k) /= norm;
    out.coefficients.row(k) *= norm;
  }
  return out;
}

Matrix axis_gram(const Matrix& F, Axis axis) {
  return axis == Axis::columns ? Matrix(F.transpose() * F)
                               : Matrix(F * F.transpose());
}

double off_diagonal_energy(const Matrix& F, Axis axis) {
  const Matrix gram = axis_gram(F, axis);
  double energy = 0.0;
  for (Eigen::Index j = 0; j < gram.cols(); ++j) {
    for (Eigen::Index i = 0; i < gram.rows(); ++i) {
      if (i != j) energy += gram(i, j) * gram(i, j);
    }
  }
  return energy;
}

}  // namespace nmfc
