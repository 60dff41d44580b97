#include "nmfc/solvers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "nmfc/errors.hpp"
#include "nmfc/rng.hpp"

namespace nmfc {

std::string_view to_string(OrthoMode mode) {
  switch (mode) {
    case OrthoMode::none: return "none";
    case OrthoMode::rows_of_c: return "rows_of_C";
    case OrthoMode::cols_of_b: return "cols_of_B";
    case OrthoMode::both: return "both";
  }
  return "none";
}

OrthoMode parse_ortho_mode(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  std::replace(lower.begin(), lower.end(), '-', '_');
  if (lower == "none") return OrthoMode::none;
  if (lower == "rows_of_c") return OrthoMode::rows_of_c;
  if (lower == "cols_of_b") return OrthoMode::cols_of_b;
  if (lower == "both") return OrthoMode::both;
  throw SpecError("unknown ortho mode '" + std::string(text) +
                  "' (expected none, rows_of_C, cols_of_B or both)");
}

void SolverOptions::validate() const {
  if (max_iterations < 1) throw SpecError("max_iterations must be >= 1");
  if (!(tolerance > 0.0)) throw SpecError("tolerance must be > 0");
  if (window < 1) throw SpecError("window must be >= 1");
  if (restarts < 1) throw SpecError("restarts must be >= 1");
  if (!(epsilon_guard > 0.0)) throw SpecError("epsilon_guard must be > 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw SpecError("lambda must be a finite value >= 0");
  }
}

namespace {

void require_rank(const Matrix& A, Eigen::Index K) {
  const Eigen::Index limit = std::min(A.rows(), A.cols());
  if (K < 1 || K > limit) {
    throw RankError("rank K=" + std::to_string(K) + " outside [1, " +
                    std::to_string(limit) + "]");
  }
}

void require_input(const Matrix& A, Eigen::Index K) {
  require_nonnegative(A, "data matrix");
  require_rank(A, K);
  if (A.maxCoeff() == 0.0) {
    throw DegenerateError("data matrix is all zeros");
  }
}

bool penalizes_basis(OrthoMode mode) {
  return mode == OrthoMode::cols_of_b || mode == OrthoMode::both;
}
bool penalizes_coefficients(OrthoMode mode) {
  return mode == OrthoMode::rows_of_c || mode == OrthoMode::both;
}

// Relative change of the tracked objective over the last `window` steps.
// Penalized updates are not monotone, so an increase does not count as
// convergence.
bool window_converged(const std::vector<double>& history, int window,
                      double tolerance) {
  const auto w = static_cast<std::size_t>(window);
  if (history.size() <= w) return false;
  const double old = history[history.size() - 1 - w];
  return std::abs(old - history.back()) <= tolerance * old;
}

TraceRecord make_record(int iteration, const Matrix& A, const Matrix& B,
                        const Matrix& C) {
  const KktResidual kkt = kkt_residual(A, B, C);
  return {iteration,
          frobenius_objective(A, B, C),
          kkt.basis,
          kkt.coefficients,
          off_diagonal_energy(B, Axis::columns),
          off_diagonal_energy(C, Axis::rows)};
}

template <typename Step>
FactorizationResult run_restarts(const Matrix& A, Eigen::Index K,
                                 const SolverOptions& options, Step&& step) {
  FactorizationResult best;
  bool have_best = false;
  const OrthoMode mode = options.ortho_mode;
  const double lambda = options.effective_lambda();

  for (int r = 0; r < options.restarts; ++r) {
    FactorPair pair = init_factors(A, K, mix_seed(options.seed, static_cast<std::uint64_t>(r)));
    Matrix& B = pair.basis;
    Matrix& C = pair.coefficients;

    ConvergenceTrace trace;
    std::vector<double> tracked;
    trace.records.push_back(make_record(0, A, B, C));
    tracked.push_back(penalized_objective(A, B, C, mode, lambda));

    bool converged = false;
    int iteration = 0;
    while (iteration < options.max_iterations) {
      step(B, C);
      ++iteration;
      trace.records.push_back(make_record(iteration, A, B, C));
      tracked.push_back(lambda == 0.0 ? trace.back().objective
                                      : penalized_objective(A, B, C, mode, lambda));
      if (window_converged(tracked, options.window, options.tolerance)) {
        converged = true;
        break;
      }
    }
    pair.objective = trace.back().objective;
    pair.iterations = iteration;
    pair.converged = converged;

    if (!have_best || tracked.back() < best.penalized_objective) {
      best.factors = std::move(pair);
      best.trace = std::move(trace);
      best.penalized_objective = tracked.back();
      best.restart = r;
      have_best = true;
    }
  }
  return best;
}

}  // namespace

FactorPair init_factors(const Matrix& A, Eigen::Index K, std::uint64_t seed) {
  require_nonnegative(A, "data matrix");
  require_rank(A, K);
  const double scale = 2.0 * std::sqrt(A.mean() / static_cast<double>(K));
  Rng rng(seed);
  FactorPair pair;
  pair.basis.resize(A.rows(), K);
  pair.coefficients.resize(K, A.cols());
  // Fill in row-major order so the draw sequence does not depend on storage.
  for (Eigen::Index i = 0; i < pair.basis.rows(); ++i) {
    for (Eigen::Index k = 0; k < K; ++k) pair.basis(i, k) = scale * rng.uniform_open();
  }
  for (Eigen::Index k = 0; k < K; ++k) {
    for (Eigen::Index j = 0; j < pair.coefficients.cols(); ++j) {
      pair.coefficients(k, j) = scale * rng.uniform_open();
    }
  }
  pair.degenerate = scale == 0.0;
  pair.objective = frobenius_objective(A, pair.basis, pair.coefficients);
  return pair;
}

double penalized_objective(const Matrix& A, const Matrix& B, const Matrix& C,
                           OrthoMode mode, double lambda) {
  double value = frobenius_objective(A, B, C);
  if (mode == OrthoMode::none || lambda == 0.0) return value;
  const auto K = B.cols();
  if (penalizes_basis(mode)) {
    value += 0.5 * lambda *
             (B.transpose() * B - Matrix::Identity(K, K)).squaredNorm();
  }
  if (penalizes_coefficients(mode)) {
    value += 0.5 * lambda *
             (C * C.transpose() - Matrix::Identity(K, K)).squaredNorm();
  }
  return value;
}

void mu_update(const Matrix& A, Matrix& B, Matrix& C, const SolverOptions& options) {
  const double eps = options.epsilon_guard;
  const double lambda = options.effective_lambda();
  const bool pen_b = lambda != 0.0 && penalizes_basis(options.ortho_mode);
  const bool pen_c = lambda != 0.0 && penalizes_coefficients(options.ortho_mode);

  // The penalty gradient 2 lambda (B B^T B - B) is split by sign between the
  // numerator and the denominator.
  {
    const Matrix CCt = C * C.transpose();
    Matrix numer = A * C.transpose();
    Matrix denom = B * CCt;
    if (pen_b) {
      numer += (2.0 * lambda) * B;
      denom += (2.0 * lambda) * (B * (B.transpose() * B));
    }
    B = B.cwiseProduct(numer).cwiseQuotient((denom.array() + eps).matrix());
  }
  {
    const Matrix BtB = B.transpose() * B;
    Matrix numer = B.transpose() * A;
    Matrix denom = BtB * C;
    if (pen_c) {
      numer += (2.0 * lambda) * C;
      denom += (2.0 * lambda) * ((C * C.transpose()) * C);
    }
    C = C.cwiseProduct(numer).cwiseQuotient((denom.array() + eps).matrix());
  }
}

MuStepResult mu_step(const Matrix& A, const Matrix& B, const Matrix& C,
                     const SolverOptions& options) {
  require_conforming(A, B, C);
  MuStepResult out{B, C};
  mu_update(A, out.basis, out.coefficients, options);
  return out;
}

FactorizationResult nmf_multiplicative(const Matrix& A, Eigen::Index K,
                                       const SolverOptions& options) {
  options.validate();
  require_input(A, K);
  return run_restarts(A, K, options, [&](Matrix& B, Matrix& C) {
    mu_update(A, B, C, options);
  });
}

FactorizationResult nmf_orthogonal(const Matrix& A, Eigen::Index K,
                                   const SolverOptions& options) {
  if (options.ortho_mode == OrthoMode::none) {
    throw SpecError("orthogonal solver requires ortho_mode != none");
  }
  return nmf_multiplicative(A, K, options);
}

void anls_update_coefficients(const Matrix& A, const Matrix& B, Matrix& C) {
  const Matrix gram = B.transpose() * B;
  const Matrix rhs = B.transpose() * A;
  for (Eigen::Index n = 0; n < A.cols(); ++n) {
    C.col(n) = nnls_gram(gram, rhs.col(n)).solution;
  }
}

void anls_update_basis(const Matrix& A, Matrix& B, const Matrix& C) {
  const Matrix gram = C * C.transpose();
  const Matrix rhs = C * A.transpose();
  for (Eigen::Index m = 0; m < A.rows(); ++m) {
    B.row(m) = nnls_gram(gram, rhs.col(m)).solution.transpose();
  }
}

FactorizationResult nmf_anls(const Matrix& A, Eigen::Index K,
                             const SolverOptions& options) {
  options.validate();
  require_input(A, K);
  SolverOptions plain = options;
  plain.ortho_mode = OrthoMode::none;
  plain.lambda = 0.0;
  return run_restarts(A, K, plain, [&](Matrix& B, Matrix& C) {
    anls_update_coefficients(A, B, C);
    anls_update_basis(A, B, C);
  });
}

}  // namespace nmfc
