#pragma once

// Experiment reports: the metric bundle computed from a factorization and its
// JSON form. Reports carry the data and raw factors so every metric can be
// recomputed from the report alone.

#include <optional>
#include <string>

#include <json.hpp>

#include "nmfc/data_io.hpp"
#include "nmfc/metrics.hpp"
#include "nmfc/solvers.hpp"

namespace nmfc {

inline constexpr const char* kReportSchemaVersion = "nmfc-report/1";

struct Labels {
  std::optional<Partition> items;
  std::optional<Partition> features;
};

struct Metrics {
  double objective = 0.0;
  KktResidual kkt;
  Eigen::Index effective_rank = 0;
  OrthogonalityDeviation basis_deviation;         // j_b2, columns of B
  OrthogonalityDeviation coefficient_deviation;   // j_c2, rows of C
  Partition item_partition;
  Partition feature_partition;
  double ra_items = 0.0;     // on A^T A
  double ra_features = 0.0;  // on A A^T
  std::optional<double> ra_items_oracle;
  std::optional<double> ra_features_oracle;
  std::optional<double> accuracy_items;
  std::optional<double> accuracy_features;
  std::optional<double> nmi_items;
  std::optional<double> nmi_features;
};

/// Objective and KKT residuals use the raw factors. Assignments and
/// orthogonality use normalize_factors after dropping factor pairs whose
/// basis column or coefficient row is zero (they contribute nothing to BC).
/// The brute-force oracle runs when the partitioned dimension is <= 12.
Metrics compute_metrics(const Matrix& A, const Matrix& B, const Matrix& C, const Labels& truth);

nlohmann::json to_json(const SolverOptions& options);
nlohmann::json to_json(const SyntheticSpec& spec);
nlohmann::json to_json(const Partition& partition);
nlohmann::json matrix_to_json(const Matrix& m);

SolverOptions solver_options_from_json(const nlohmann::json& j);
Matrix matrix_from_json(const nlohmann::json& j);
Partition partition_from_json(const nlohmann::json& j);

struct ReportContext {
  nlohmann::json input;   // {"path": ...} or {"synthetic": {...}}
  std::string solver;     // mu, anls or ortho
  double seconds = 0.0;
  bool include_trace = false;
};

nlohmann::json make_report(const Matrix& A, const FactorizationResult& result,
                           const Labels& truth, const SolverOptions& options,
                           const ReportContext& context);

/// Recomputes the metric block of a report from its stored data, factors
/// and labels. Throws ParseError when required fields are missing.
nlohmann::json evaluate_report(const nlohmann::json& report);

/// Metric block only (the keys shared by reports and evaluate output).
nlohmann::json metrics_block(const Metrics& metrics);

/// K-means on the items (columns of A) and the spectral ratio-association
/// baseline on `affinity`, scored against `truth` when present.
nlohmann::json baseline_report(const Matrix& A, const Matrix& affinity, int K,
                               std::uint64_t seed, const std::optional<Partition>& truth);

}  // namespace nmfc
