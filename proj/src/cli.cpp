#include "nmfc/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "nmfc/affinity.hpp"
#include "nmfc/data_io.hpp"
#include "nmfc/errors.hpp"
#include "nmfc/report.hpp"
#include "nmfc/solvers.hpp"

namespace nmfc::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

// Where the data matrix comes from: a file or a synthetic generator.
struct DataFlags {
  std::string input;
  std::string labels;
  std::string feature_labels;
  std::string kind;
  long long m = 0;
  long long n = 0;
  double noise = 0.0;
  double overlap = 0.0;
  std::optional<std::uint64_t> data_seed;
  bool symmetrize = false;

  void add(CLI::App& app) {
    app.add_option("--input", input, "Data matrix (.mtx MatrixMarket, otherwise CSV)");
    app.add_option("--labels", labels, "Planted item labels, one integer per line");
    app.add_option("--feature-labels", feature_labels, "Planted feature labels");
    app.add_option("--kind", kind,
                   "Generate data instead: block-diagonal, mixture-docs, planted-graph, "
                   "directed-planted-graph");
    app.add_option("--m", m, "Generated feature count");
    app.add_option("--n", n, "Generated item (vertex) count");
    app.add_option("--noise", noise, "Generator noise in [0, 1)");
    app.add_option("--overlap", overlap, "Mixture-docs topic overlap");
    app.add_option("--data-seed", data_seed, "Generator seed (defaults to the solver seed)");
    app.add_flag("--symmetrize", symmetrize, "Replace a directed affinity V by V + V^T");
  }
};

struct LoadedData {
  Matrix A;
  Labels truth;
  json descriptor;
  bool graph = false;
};

LoadedData load_data(const DataFlags& flags, int k, std::uint64_t seed) {
  if (flags.input.empty() == flags.kind.empty()) {
    throw UsageError("exactly one of --input or --kind is required");
  }
  LoadedData out;
  bool directed = flags.symmetrize;
  if (!flags.kind.empty()) {
    SyntheticSpec spec;
    spec.kind = parse_synthetic_kind(flags.kind);
    spec.m = flags.m;
    spec.n = flags.n;
    spec.k = k;
    spec.noise = flags.noise;
    spec.overlap = flags.overlap;
    spec.seed = flags.data_seed.value_or(seed);
    SyntheticDataset d = generate(spec);
    out.A = std::move(d.data);
    out.truth = {std::move(d.items), std::move(d.features)};
    out.descriptor = {{"synthetic", to_json(spec)}};
    out.graph = spec.is_graph();
    directed = directed || spec.kind == SyntheticKind::directed_planted_graph;
  } else {
    out.A = read_matrix(flags.input);
    out.descriptor = {{"path", flags.input}};
    if (!flags.labels.empty()) out.truth.items = read_labels(flags.labels);
    if (!flags.feature_labels.empty()) out.truth.features = read_labels(flags.feature_labels);
  }
  if (directed) {
    out.A = symmetrize(out.A).matrix;
    out.descriptor["symmetrized"] = true;
    out.graph = true;
  }
  return out;
}

struct SolverFlags {
  int k = 0;
  std::string solver = "mu";
  std::string ortho_mode = "none";
  double lambda = 0.0;
  SolverOptions options;

  void add(CLI::App& app, bool with_solver) {
    app.add_option("--k", k, "Number of factors / clusters")->required();
    if (with_solver) {
      app.add_option("--solver", solver, "mu, anls or ortho");
      app.add_option("--lambda", lambda, "Orthogonality penalty weight");
    }
    app.add_option("--ortho-mode", ortho_mode, "none, rows_of_C, cols_of_B or both");
    app.add_option("--max-iterations", options.max_iterations);
    app.add_option("--tolerance", options.tolerance);
    app.add_option("--window", options.window);
    app.add_option("--seed", options.seed);
    app.add_option("--restarts", options.restarts);
    app.add_option("--epsilon", options.epsilon_guard, "Denominator guard");
  }

  void check_k() const {
    if (k < 1) throw UsageError("--k must be >= 1, got " + std::to_string(k));
  }
};

// Applies the solver/mode pairing rules and returns options for one run.
SolverOptions resolve_options(const std::string& solver, const std::string& mode_text,
                              double lambda, SolverOptions base) {
  const OrthoMode mode = parse_ortho_mode(mode_text);
  if (solver == "ortho") {
    if (mode == OrthoMode::none) {
      throw UsageError("--solver ortho requires --ortho-mode rows_of_C, cols_of_B or both");
    }
    base.ortho_mode = mode;
    base.lambda = lambda;
  } else if (solver == "mu" || solver == "anls") {
    if (mode != OrthoMode::none) {
      throw UsageError("--ortho-mode applies only to --solver ortho");
    }
    base.ortho_mode = OrthoMode::none;
    base.lambda = 0.0;
  } else {
    throw UsageError("unknown solver '" + solver + "' (expected mu, anls or ortho)");
  }
  base.validate();
  return base;
}

FactorizationResult run_solver(const std::string& solver, const Matrix& A, int k,
                               const SolverOptions& options) {
  if (solver == "anls") return nmf_anls(A, k, options);
  if (solver == "ortho") return nmf_orthogonal(A, k, options);
  return nmf_multiplicative(A, k, options);
}

json timed_report(const std::string& solver, const LoadedData& data, int k,
                  const SolverOptions& options, bool trace, bool timing) {
  const auto start = std::chrono::steady_clock::now();
  FactorizationResult result = run_solver(solver, data.A, k, options);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ReportContext ctx{data.descriptor, solver, timing ? seconds : 0.0, trace};
  return make_report(data.A, result, data.truth, options, ctx);
}

void write_json(const std::string& path, const json& j, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << j.dump(2) << '\n';
    return;
  }
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  file << j.dump(2) << '\n';
  if (!file) throw IoError("failed writing '" + path + "'");
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return json::parse(in);
}

// Shortest text that reads back to the same double.
std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  std::uint64_t a = 0, b = 0;
  auto parse = [&](std::string_view s, std::uint64_t& v) {
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && p == s.data() + s.size();
  };
  const std::string_view sv(text);
  if (dots == std::string::npos) {
    if (!parse(sv, a)) throw UsageError("malformed --seeds '" + text + "' (expected a..b)");
    return {a, a};
  }
  if (!parse(sv.substr(0, dots), a) || !parse(sv.substr(dots + 2), b)) {
    throw UsageError("malformed --seeds '" + text + "' (expected a..b)");
  }
  if (b < a) throw UsageError("empty seed range '" + text + "'");
  return {a, b};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_gen(const DataFlags& flags, int k, std::uint64_t seed, const std::string& out_matrix,
            const std::string& out_labels, const std::string& out_features, std::ostream& out) {
  if (flags.kind.empty()) throw UsageError("gen requires --kind");
  SyntheticSpec spec;
  spec.kind = parse_synthetic_kind(flags.kind);
  spec.m = flags.m;
  spec.n = flags.n;
  spec.k = k;
  spec.noise = flags.noise;
  spec.overlap = flags.overlap;
  spec.seed = seed;
  const SyntheticDataset d = generate(spec);
  write_matrix_market(out_matrix, d.data);
  if (d.items) write_labels(out_labels, *d.items);
  if (!out_features.empty() && d.features) write_labels(out_features, *d.features);
  json echo = to_json(spec);
  echo["matrix"] = out_matrix;
  echo["labels"] = out_labels;
  if (!out_features.empty()) echo["feature_labels"] = out_features;
  out << echo.dump(2) << '\n';
  return kOk;
}

struct SweepCell {
  std::string solver;
  std::uint64_t seed = 0;
  double lambda = 0.0;
  json report;
};

int cmd_sweep(const DataFlags& data_flags, const SolverFlags& sf, const std::string& solvers_text,
              const std::string& seeds_text, const std::vector<double>& lambdas,
              const std::string& out_dir, bool timing, std::ostream& out) {
  sf.check_k();
  if (seeds_text.empty()) throw UsageError("sweep requires --seeds a..b");
  const auto [first, last] = parse_seed_range(seeds_text);
  std::vector<std::string> solvers;
  {
    std::stringstream ss(solvers_text);
    std::string s;
    while (std::getline(ss, s, ',')) {
      if (!s.empty()) solvers.push_back(s);
    }
  }
  if (solvers.empty()) throw UsageError("--solvers is empty");
  const std::vector<double> lambda_set = lambdas.empty() ? std::vector<double>{0.0} : lambdas;

  std::vector<SweepCell> cells;
  for (const auto& solver : solvers) {
    const bool penalized = solver == "ortho";
    // Validate the pairing up front so usage errors surface before any work.
    resolve_options(solver, penalized ? sf.ortho_mode : "none", 0.0, sf.options);
    for (double lambda : penalized ? lambda_set : std::vector<double>{0.0}) {
      for (std::uint64_t seed = first; seed <= last; ++seed) {
        cells.push_back({solver, seed, lambda, json()});
        if (seed == last) break;
      }
    }
  }
  if (!fs::exists(out_dir)) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create directory '" + out_dir + "': " + ec.message());
  }

  // Each cell owns its seed and output slot; the summary is a fold over
  // `cells` in construction order after every worker has joined.
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(cells.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      SweepCell& cell = cells[i];
      try {
        SolverOptions base = sf.options;
        base.seed = cell.seed;
        const SolverOptions options =
            resolve_options(cell.solver, cell.solver == "ortho" ? sf.ortho_mode : "none",
                            cell.lambda, base);
        const LoadedData data = load_data(data_flags, sf.k, cell.seed);
        cell.report = timed_report(cell.solver, data, sf.k, options, false, timing);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1U, std::min<unsigned>(sweep_threads(), cells.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  std::ostringstream csv;
  csv << "solver,seed,lambda,objective,kkt_b,kkt_c,jb2_norm,jc2_norm,ra_items,accuracy,nmi,seconds\n";
  auto opt = [](const json& v) { return v.is_null() ? std::string() : format_number(v.get<double>()); };
  struct Column {
    const char* name;
    std::function<json(const json&)> get;
  };
  const std::vector<Column> columns = {
      {"objective", [](const json& r) { return r["objective"]; }},
      {"kkt_b", [](const json& r) { return r["kkt"]["basis"]; }},
      {"kkt_c", [](const json& r) { return r["kkt"]["coefficients"]; }},
      {"jb2_norm", [](const json& r) { return r["orthogonality"]["jb2_normalized"]; }},
      {"jc2_norm", [](const json& r) { return r["orthogonality"]["jc2_normalized"]; }},
      {"ra_items", [](const json& r) { return r["ratio_association"]["items"]; }},
      {"accuracy", [](const json& r) { return r["accuracy"]["items"]; }},
      {"nmi", [](const json& r) { return r["nmi"]["items"]; }},
      {"seconds", [](const json& r) { return r["seconds"]; }},
  };
  for (const SweepCell& cell : cells) {
    std::ostringstream name;
    name << cell.solver << "_seed" << cell.seed << "_lambda" << format_number(cell.lambda) << ".json";
    write_json((fs::path(out_dir) / name.str()).string(), cell.report, out);
    csv << cell.solver << ',' << cell.seed << ',' << format_number(cell.lambda);
    for (const auto& c : columns) csv << ',' << opt(c.get(cell.report));
    csv << '\n';
  }
  // Median rows per (solver, lambda), in first-appearance order.
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0 && cells[i - 1].solver == cells[i].solver && cells[i - 1].lambda == cells[i].lambda) {
      continue;
    }
    csv << cells[i].solver << ",median," << format_number(cells[i].lambda);
    for (const auto& c : columns) {
      std::vector<double> values;
      for (const SweepCell& other : cells) {
        if (other.solver != cells[i].solver || other.lambda != cells[i].lambda) continue;
        const json v = c.get(other.report);
        if (!v.is_null()) values.push_back(v.get<double>());
      }
      csv << ',' << (values.empty() ? std::string() : format_number(median(values)));
    }
    csv << '\n';
  }
  const fs::path summary = fs::path(out_dir) / "summary.csv";
  std::ofstream file(summary, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + summary.string() + "' for writing");
  file << csv.str();
  if (!file) throw IoError("failed writing '" + summary.string() + "'");
  out << "wrote " << cells.size() << " reports and " << summary.string() << '\n';
  return kOk;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonnegative matrix factorization clustering toolkit", "nmfc"};
  app.require_subcommand(1);

  // gen
  DataFlags gen_data;
  int gen_k = 2;
  std::uint64_t gen_seed = 0;
  std::string gen_out = "data.mtx", gen_labels = "labels.csv", gen_features;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
  gen->add_option("--kind", gen_data.kind)->required();
  gen->add_option("--m", gen_data.m);
  gen->add_option("--n", gen_data.n);
  gen->add_option("--k", gen_k);
  gen->add_option("--noise", gen_data.noise);
  gen->add_option("--overlap", gen_data.overlap);
  gen->add_option("--seed", gen_seed);
  gen->add_option("--out", gen_out, "MatrixMarket output path");
  gen->add_option("--labels-out", gen_labels, "Item label output path");
  gen->add_option("--feature-labels-out", gen_features, "Feature label output path");

  // factorize
  DataFlags fac_data;
  SolverFlags fac;
  std::string fac_out = "report.json";
  bool fac_trace = false;
  auto* factorize = app.add_subcommand("factorize", "Run one factorization and write a report");
  fac_data.add(*factorize);
  fac.add(*factorize, true);
  factorize->add_option("--out", fac_out, "Report path ('-' for stdout)");
  factorize->add_flag("--trace", fac_trace, "Include the per-iteration trace");

  // evaluate
  std::string ev_report, ev_data, ev_basis, ev_coef, ev_labels, ev_features, ev_out;
  auto* evaluate = app.add_subcommand("evaluate", "Recompute metrics from a report or factors");
  evaluate->add_option("--report", ev_report);
  evaluate->add_option("--data", ev_data);
  evaluate->add_option("--basis", ev_basis);
  evaluate->add_option("--coefficients", ev_coef);
  evaluate->add_option("--labels", ev_labels);
  evaluate->add_option("--feature-labels", ev_features);
  evaluate->add_option("--out", ev_out, "Output path (default stdout)");

  // sweep
  DataFlags sw_data;
  SolverFlags sw;
  std::string sw_solvers = "mu", sw_seeds, sw_out = "sweep";
  std::vector<double> sw_lambdas;
  bool sw_no_timing = false;
  auto* sweep = app.add_subcommand("sweep", "Run a grid of (solver, seed, lambda) cells");
  sw_data.add(*sweep);
  sw.add(*sweep, false);
  sweep->add_option("--solvers", sw_solvers, "Comma-separated solvers");
  sweep->add_option("--seeds", sw_seeds, "Seed range a..b")->required();
  sweep->add_option("--lambdas", sw_lambdas, "Penalty weights for the ortho solver")->delimiter(',');
  sweep->add_option("--out", sw_out, "Output directory");
  sweep->add_flag("--no-timing", sw_no_timing, "Record seconds as 0 for reproducible output");

  // compare
  DataFlags cmp_data;
  SolverFlags cmp;
  std::string cmp_out = "compare.json";
  bool cmp_graph = false;
  auto* compare = app.add_subcommand("compare", "NMF, k-means and spectral on one input");
  cmp_data.add(*compare);
  cmp.add(*compare, true);
  compare->add_option("--out", cmp_out);
  compare->add_flag("--graph", cmp_graph, "Input is an affinity matrix; spectral runs on it directly");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  if (gen->parsed()) {
    return cmd_gen(gen_data, gen_k, gen_seed, gen_out, gen_labels, gen_features, out);
  }
  if (factorize->parsed()) {
    fac.check_k();
    const SolverOptions options = resolve_options(fac.solver, fac.ortho_mode, fac.lambda, fac.options);
    const LoadedData data = load_data(fac_data, fac.k, options.seed);
    const json report = timed_report(fac.solver, data, fac.k, options, fac_trace, true);
    write_json(fac_out, report, out);
    if (fac_out != "-") {
      out << "objective " << format_number(report["objective"].get<double>()) << ", "
          << report["iterations"] << " iterations, converged=" << report["converged"] << '\n';
    }
    return kOk;
  }
  if (evaluate->parsed()) {
    json result;
    if (!ev_report.empty()) {
      result = evaluate_report(read_json(ev_report));
    } else {
      if (ev_data.empty() || ev_basis.empty() || ev_coef.empty()) {
        throw UsageError("evaluate needs --report, or --data, --basis and --coefficients");
      }
      Labels truth;
      if (!ev_labels.empty()) truth.items = read_labels(ev_labels);
      if (!ev_features.empty()) truth.features = read_labels(ev_features);
      result = {{"schema_version", kReportSchemaVersion}};
      result.update(metrics_block(compute_metrics(read_matrix(ev_data), read_matrix(ev_basis),
                                                  read_matrix(ev_coef), truth)));
    }
    write_json(ev_out, result, out);
    return kOk;
  }
  if (sweep->parsed()) {
    return cmd_sweep(sw_data, sw, sw_solvers, sw_seeds, sw_lambdas, sw_out, !sw_no_timing, out);
  }
  if (compare->parsed()) {
    cmp.check_k();
    const SolverOptions options = resolve_options(cmp.solver, cmp.ortho_mode, cmp.lambda, cmp.options);
    const LoadedData data = load_data(cmp_data, cmp.k, options.seed);
    const bool graph = cmp_graph || data.graph;
    const Matrix affinity = graph ? undirected_affinity(data.A).matrix : item_affinity(data.A).matrix;
    json merged = {{"schema_version", kReportSchemaVersion}};
    merged["nmf"] = timed_report(cmp.solver, data, cmp.k, options, false, true);
    merged["baselines"] = baseline_report(data.A, affinity, cmp.k, options.seed, data.truth.items);
    merged["baselines"]["spectral"]["affinity"] = graph ? "input" : "item";
    write_json(cmp_out, merged, out);
    return kOk;
  }
  return kUsage;
}

}  // namespace

unsigned sweep_threads() {
  if (const char* env = std::getenv("NMF_CLUSTER_THREADS")) {
    unsigned v = 0;
    const std::string_view s(env);
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && p == s.data() + s.size() && v > 0) return v;
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const SpecError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const RankError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kIo;
  } catch (const nlohmann::json::exception& e) {
    err << "parse error: " << e.what() << '\n';
    return kIo;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kDomain;
  } catch (const DegenerateError& e) {
    err << "domain error: " << e.what() << '\n';
    return kDomain;
  } catch (const DimensionError& e) {
    err << "domain error: " << e.what() << '\n';
    return kDomain;
  } catch (const SizeLimitError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace nmfc::cli
