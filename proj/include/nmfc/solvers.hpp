#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "nmfc/model.hpp"

namespace nmfc {

/// Which orthogonality penalty is added to the Frobenius objective.
///   none       J
///   rows_of_c  J + lambda/2 ||C C^T - I||_F^2
///   cols_of_b  J + lambda/2 ||B^T B - I||_F^2
///   both       J + both penalties
enum class OrthoMode { none, rows_of_c, cols_of_b, both };

std::string_view to_string(OrthoMode mode);
/// Accepts "none", "rows_of_C", "cols_of_B", "both" (case-insensitive).
OrthoMode parse_ortho_mode(std::string_view text);

struct SolverOptions {
  int max_iterations = 500;
  double tolerance = 1e-6;  // relative objective decrease over `window`
  int window = 10;
  std::uint64_t seed = 0;
  int restarts = 1;
  double epsilon_guard = 1e-12;
  OrthoMode ortho_mode = OrthoMode::none;
  double lambda = 0.0;

  /// Throws SpecError on an out-of-range field.
  void validate() const;
  /// Penalty weight actually applied (zero when ortho_mode is none).
  double effective_lambda() const {
    return ortho_mode == OrthoMode::none ? 0.0 : lambda;
  }
};

struct FactorizationResult {
  FactorPair factors;
  ConvergenceTrace trace;
  /// Objective including the orthogonality penalty; equals the raw objective
  /// when no penalty is active.
  double penalized_objective = 0.0;
  int restart = 0;  // index of the restart that produced `factors`
};

/// Strictly positive random factors with entries 2 sqrt(mean(A)/K) * U(0,1),
/// so that E[mean(BC)] = mean(A). An all-zero A yields zero factors with
/// `degenerate` set.
FactorPair init_factors(const Matrix& A, Eigen::Index K, std::uint64_t seed);

double penalized_objective(const Matrix& A, const Matrix& B, const Matrix& C,
                           OrthoMode mode, double lambda);

/// One multiplicative update: B first, then C using the new B.
void mu_update(const Matrix& A, Matrix& B, Matrix& C, const SolverOptions& options);

struct MuStepResult {
  Matrix basis;
  Matrix coefficients;
};
MuStepResult mu_step(const Matrix& A, const Matrix& B, const Matrix& C,
                     const SolverOptions& options);

/// Multiplicative updates for the selected regime; `ortho_mode` and `lambda`
/// are honoured, so with ortho_mode = none this is plain Lee-Seung NMF.
FactorizationResult nmf_multiplicative(const Matrix& A, Eigen::Index K,
                                       const SolverOptions& options);

/// Penalized multiplicative updates. Requires ortho_mode != none.
FactorizationResult nmf_orthogonal(const Matrix& A, Eigen::Index K,
                                   const SolverOptions& options);

/// Alternating nonnegative least squares: exact NNLS for every column of C,
/// then for every row of B. Ignores the orthogonality settings.
FactorizationResult nmf_anls(const Matrix& A, Eigen::Index K,
                             const SolverOptions& options);

/// ANLS half-sweeps, exposed for testing block optimality.
void anls_update_coefficients(const Matrix& A, const Matrix& B, Matrix& C);
void anls_update_basis(const Matrix& A, Matrix& B, const Matrix& C);

// ---------------------------------------------------------------------------
// Nonnegative least squares

struct NnlsProblem {
  Matrix design;  // m x k
  Vector target;  // m
};

struct NnlsResult {
  Vector solution;
  int swaps = 0;
  bool converged = true;
};

/// Lawson-Hanson active set on the normal equations: minimizes
/// 1/2 x^T G x - r^T x subject to x >= 0, where G = D^T D and r = D^T a.
/// Stops after `max_swaps` additions to the passive set (0 means 3k).
NnlsResult nnls_gram(const Matrix& gram, const Vector& rhs, int max_swaps = 0);

/// argmin_{c >= 0} 1/2 ||target - design c||^2. Throws DomainError on
/// non-finite input and ConvergenceError (with the best iterate) when the
/// swap budget of 3k is exhausted.
Vector nnls_solve(const NnlsProblem& problem);

double nnls_objective(const NnlsProblem& problem, const Vector& c);

}  // namespace nmfc
