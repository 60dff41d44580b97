#include "nmfc/report.hpp"

#include <vector>

#include "nmfc/affinity.hpp"
#include "nmfc/baselines.hpp"
#include "nmfc/errors.hpp"

namespace nmfc {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json deviation_json(const Metrics& m) {
  return {{"jb2", m.basis_deviation.energy},
          {"jb2_normalized", m.basis_deviation.normalized},
          {"jc2", m.coefficient_deviation.energy},
          {"jc2_normalized", m.coefficient_deviation.normalized}};
}

const json& require_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ParseError(std::string("report is missing field '") + key + "'", 0);
  }
  return j.at(key);
}

}  // namespace

Metrics compute_metrics(const Matrix& A, const Matrix& B, const Matrix& C, const Labels& truth) {
  require_nonnegative(A, "data matrix");
  require_conforming(A, B, C);
  Metrics m;
  m.objective = frobenius_objective(A, B, C);
  m.kkt = kkt_residual(A, B, C);

  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < B.cols(); ++k) {
    if (B.col(k).maxCoeff() > 0.0 && C.row(k).maxCoeff() > 0.0) keep.push_back(k);
  }
  if (keep.empty()) throw DegenerateError("every factor pair is zero");
  const auto r = static_cast<Eigen::Index>(keep.size());
  Matrix Bk(B.rows(), r), Ck(r, C.cols());
  for (Eigen::Index i = 0; i < r; ++i) {
    Bk.col(i) = B.col(keep[static_cast<std::size_t>(i)]);
    Ck.row(i) = C.row(keep[static_cast<std::size_t>(i)]);
  }
  m.effective_rank = r;

  const NormalizedFactors nf = normalize_factors(Bk, Ck);
  m.basis_deviation = orthogonality_deviation(nf.basis, Axis::columns);
  m.coefficient_deviation = orthogonality_deviation(nf.coefficients, Axis::rows);

  // Cluster ids refer to the original factor index, so K stays B.cols().
  const auto K = static_cast<int>(B.cols());
  auto remap = [&](Partition p) {
    for (int& label : p.labels) label = static_cast<int>(keep[static_cast<std::size_t>(label)]);
    p.k = K;
    return p;
  };
  m.item_partition = remap(assign_items(nf.coefficients, true));
  m.feature_partition = remap(assign_features(nf.basis, true));

  const AffinityMatrix items = item_affinity(A);
  const AffinityMatrix features = feature_affinity(A);
  m.ra_items = ratio_association(items, m.item_partition);
  m.ra_features = ratio_association(features, m.feature_partition);
  if (items.size() <= 12) m.ra_items_oracle = brute_force_ratio_assoc(items, K).value;
  if (features.size() <= 12) m.ra_features_oracle = brute_force_ratio_assoc(features, K).value;

  if (truth.items) {
    m.accuracy_items = cluster_accuracy(m.item_partition, *truth.items);
    m.nmi_items = nmi(m.item_partition, *truth.items);
  }
  if (truth.features) {
    m.accuracy_features = cluster_accuracy(m.feature_partition, *truth.features);
    m.nmi_features = nmi(m.feature_partition, *truth.features);
  }
  return m;
}

json metrics_block(const Metrics& m) {
  return {
      {"objective", m.objective},
      {"kkt", {{"basis", m.kkt.basis}, {"coefficients", m.kkt.coefficients}}},
      {"effective_rank", m.effective_rank},
      {"orthogonality", deviation_json(m)},
      {"ratio_association",
       {{"items", m.ra_items},
        {"features", m.ra_features},
        {"items_oracle", optional_number(m.ra_items_oracle)},
        {"features_oracle", optional_number(m.ra_features_oracle)}}},
      {"accuracy",
       {{"items", optional_number(m.accuracy_items)},
        {"features", optional_number(m.accuracy_features)}}},
      {"nmi",
       {{"items", optional_number(m.nmi_items)}, {"features", optional_number(m.nmi_features)}}},
      {"assignments", {{"items", m.item_partition.labels}, {"features", m.feature_partition.labels}}},
  };
}

json to_json(const SolverOptions& o) {
  return {{"max_iterations", o.max_iterations}, {"tolerance", o.tolerance},
          {"window", o.window},                 {"seed", o.seed},
          {"restarts", o.restarts},             {"epsilon_guard", o.epsilon_guard},
          {"ortho_mode", std::string(to_string(o.ortho_mode))},
          {"lambda", o.lambda}};
}

SolverOptions solver_options_from_json(const json& j) {
  SolverOptions o;
  o.max_iterations = j.value("max_iterations", o.max_iterations);
  o.tolerance = j.value("tolerance", o.tolerance);
  o.window = j.value("window", o.window);
  o.seed = j.value("seed", o.seed);
  o.restarts = j.value("restarts", o.restarts);
  o.epsilon_guard = j.value("epsilon_guard", o.epsilon_guard);
  o.ortho_mode = parse_ortho_mode(j.value("ortho_mode", std::string("none")));
  o.lambda = j.value("lambda", o.lambda);
  return o;
}

json to_json(const SyntheticSpec& s) {
  return {{"kind", std::string(to_string(s.kind))},
          {"m", s.m},
          {"n", s.n},
          {"k", s.k},
          {"noise", s.noise},
          {"overlap", s.overlap},
          {"seed", s.seed}};
}

json to_json(const Partition& p) { return {{"k", p.k}, {"labels", p.labels}}; }

Partition partition_from_json(const json& j) {
  return Partition(require_field(j, "labels").get<std::vector<int>>(),
                   require_field(j, "k").get<int>());
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j.front().is_array() || j.front().empty()) {
    throw ParseError("matrix must be a non-empty array of rows", 0);
  }
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j.front().size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != j.front().size()) {
      throw ParseError("matrix row " + std::to_string(i) + " has the wrong length", 0);
    }
    for (std::size_t c = 0; c < j[i].size(); ++c) {
      if (!j[i][c].is_number()) throw ParseError("matrix entry is not a number", 0);
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = j[i][c].get<double>();
    }
  }
  return m;
}

json make_report(const Matrix& A, const FactorizationResult& result, const Labels& truth,
                 const SolverOptions& options, const ReportContext& context) {
  const FactorPair& f = result.factors;
  const Metrics metrics = compute_metrics(A, f.basis, f.coefficients, truth);
  json report = {
      {"schema_version", kReportSchemaVersion},
      {"input", context.input},
      {"solver", {{"name", context.solver}, {"options", to_json(options)}}},
      {"shape", {{"m", A.rows()}, {"n", A.cols()}, {"k", f.rank()}}},
      {"seed", options.seed},
      {"penalized_objective", result.penalized_objective},
      {"iterations", f.iterations},
      {"converged", f.converged},
      {"restart", result.restart},
      {"seconds", context.seconds},
  };
  report.update(metrics_block(metrics));
  report["data"] = matrix_to_json(A);
  report["factors"] = {{"basis", matrix_to_json(f.basis)},
                       {"coefficients", matrix_to_json(f.coefficients)}};
  report["labels"] = {{"items", truth.items ? to_json(*truth.items) : json(nullptr)},
                      {"features", truth.features ? to_json(*truth.features) : json(nullptr)}};
  if (context.include_trace) {
    json trace = json::array();
    for (const TraceRecord& r : result.trace.records) {
      trace.push_back({{"iteration", r.iteration},
                       {"objective", r.objective},
                       {"kkt_basis", r.kkt_basis},
                       {"kkt_coefficients", r.kkt_coefficients},
                       {"jb2", r.basis_off_diagonal},
                       {"jc2", r.coefficients_off_diagonal}});
    }
    report["trace"] = std::move(trace);
  }
  return report;
}

json evaluate_report(const json& report) {
  const Matrix A = matrix_from_json(require_field(report, "data"));
  const json& factors = require_field(report, "factors");
  const Matrix B = matrix_from_json(require_field(factors, "basis"));
  const Matrix C = matrix_from_json(require_field(factors, "coefficients"));
  Labels truth;
  if (report.contains("labels")) {
    const json& labels = report.at("labels");
    if (labels.contains("items") && !labels.at("items").is_null()) {
      truth.items = partition_from_json(labels.at("items"));
    }
    if (labels.contains("features") && !labels.at("features").is_null()) {
      truth.features = partition_from_json(labels.at("features"));
    }
  }
  json out = {{"schema_version", kReportSchemaVersion}};
  out.update(metrics_block(compute_metrics(A, B, C, truth)));
  return out;
}

json baseline_report(const Matrix& A, const Matrix& affinity, int K, std::uint64_t seed,
                     const std::optional<Partition>& truth) {
  KmeansOptions ko;
  ko.k = K;
  ko.seed = seed;
  const KmeansResult km = kmeans(A.transpose(), ko);
  const Partition spectral = spectral_ratio_assoc(affinity, K, seed);

  auto scored = [&](const Partition& p) {
    json j = {{"assignments", p.labels}, {"ra", ratio_association(affinity, p)}};
    j["accuracy"] = truth ? json(cluster_accuracy(p, *truth)) : json(nullptr);
    j["nmi"] = truth ? json(nmi(p, *truth)) : json(nullptr);
    return j;
  };
  json kmeans_json = scored(km.partition);
  kmeans_json["inertia"] = km.inertia;
  return {{"kmeans", kmeans_json}, {"spectral", scored(spectral)}};
}

}  // namespace nmfc
