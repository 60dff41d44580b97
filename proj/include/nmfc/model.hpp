#pragma once

// Core factorization model: matrix conventions, the Frobenius objective
// J(B, C) = 1/2 ||A - BC||_F^2, its gradients and the projected KKT residual.

#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace nmfc {

/// Dense real matrix. Data matrices are feature-by-item (M x N); the basis is
/// M x K and the coefficients K x N.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Throws DimensionError for an empty matrix and DomainError on NaN/Inf.
void require_valid(const Matrix& m, std::string_view what);
/// require_valid plus every entry >= 0; the message names the first
/// offending (row, col), zero-based.
void require_nonnegative(const Matrix& m, std::string_view what);
void require_conforming(const Matrix& A, const Matrix& B, const Matrix& C);

struct FactorPair {
  Matrix basis;         // B, M x K
  Matrix coefficients;  // C, K x N
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Set when the factors were initialised from an all-zero matrix.
  bool degenerate = false;

  Eigen::Index rank() const { return basis.cols(); }
};

struct TraceRecord {
  int iteration = 0;
  double objective = 0.0;
  double kkt_basis = 0.0;
  double kkt_coefficients = 0.0;
  double basis_off_diagonal = 0.0;         // j_b2 of the current B
  double coefficients_off_diagonal = 0.0;  // j_c2 of the current C
};

struct ConvergenceTrace {
  std::vector<TraceRecord> records;

  bool empty() const { return records.empty(); }
  const TraceRecord& back() const { return records.back(); }
};

double frobenius_objective(const Matrix& A, const Matrix& B, const Matrix& C);

/// (BC - A) C^T
Matrix basis_gradient(const Matrix& A, const Matrix& B, const Matrix& C);
/// B^T (BC - A)
Matrix coefficient_gradient(const Matrix& A, const Matrix& B, const Matrix& C);

struct KktResidual {
  double basis = 0.0;
  double coefficients = 0.0;
};

/// Frobenius norms of min(B, grad_B J) and min(C, grad_C J). Both are zero
/// exactly at a KKT point of the nonnegatively constrained objective.
KktResidual kkt_residual(const Matrix& A, const Matrix& B, const Matrix& C);

struct NormalizedFactors {
  Matrix basis;
  Matrix coefficients;
  Vector scales;  // original column norms of B
};

/// Rescales B to unit-norm columns and moves the scale into the rows of C,
/// so that the product is unchanged. Throws DegenerateError on a zero column.
NormalizedFactors normalize_factors(const Matrix& B, const Matrix& C);

enum class Axis { columns, rows };

/// Sum over i != j of (f_i . f_j)^2 for the columns (or rows) of F.
double off_diagonal_energy(const Matrix& F, Axis axis);

/// Gram matrix of the columns (F^T F) or rows (F F^T).
Matrix axis_gram(const Matrix& F, Axis axis);

}  // namespace nmfc
