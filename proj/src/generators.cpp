#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "nmfc/data_io.hpp"
#include "nmfc/errors.hpp"
#include "nmfc/rng.hpp"

namespace nmfc {

std::string_view to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::block_diagonal: return "block-diagonal";
    case SyntheticKind::mixture_docs: return "mixture-docs";
    case SyntheticKind::planted_graph: return "planted-graph";
    case SyntheticKind::directed_planted_graph: return "directed-planted-graph";
  }
  return "block-diagonal";
}

SyntheticKind parse_synthetic_kind(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return c == '_' ? '-' : static_cast<char>(std::tolower(c));
  });
  if (s == "block-diagonal") return SyntheticKind::block_diagonal;
  if (s == "mixture-docs") return SyntheticKind::mixture_docs;
  if (s == "planted-graph") return SyntheticKind::planted_graph;
  if (s == "directed-planted-graph") return SyntheticKind::directed_planted_graph;
  throw SpecError("unknown dataset kind '" + std::string(text) +
                  "' (expected block-diagonal, mixture-docs, planted-graph or "
                  "directed-planted-graph)");
}

void SyntheticSpec::validate() const {
  if (k < 1) throw SpecError("k=" + std::to_string(k) + " must be >= 1");
  if (!(noise >= 0.0 && noise < 1.0)) {
    throw SpecError("noise=" + std::to_string(noise) + " must lie in [0, 1)");
  }
  if (!(overlap >= 0.0) || !std::isfinite(overlap)) {
    throw SpecError("overlap=" + std::to_string(overlap) + " must be >= 0");
  }
  if (n < 1) throw SpecError("n=" + std::to_string(n) + " must be >= 1");
  if (is_graph()) {
    if (k > n) {
      throw SpecError("k=" + std::to_string(k) + " exceeds the vertex count n=" + std::to_string(n));
    }
    return;
  }
  if (m < 1) throw SpecError("m=" + std::to_string(m) + " must be >= 1");
  if (k > std::min(m, n)) {
    throw SpecError("k=" + std::to_string(k) + " exceeds min(m, n)=" +
                    std::to_string(std::min(m, n)));
  }
  if (kind == SyntheticKind::mixture_docs && overlap >= 1.0) {
    throw SpecError("overlap=" + std::to_string(overlap) +
                    " must be < 1 so the dominant topic keeps positive weight");
  }
}

namespace {

void require_kind(const SyntheticSpec& spec, bool ok, std::string_view generator) {
  spec.validate();
  if (!ok) {
    throw SpecError(std::string(generator) + " cannot generate kind " +
                    std::string(to_string(spec.kind)));
  }
}

}  // namespace

BlockDiagonalData gen_block_diagonal(const SyntheticSpec& spec) {
  require_kind(spec, spec.kind == SyntheticKind::block_diagonal, "gen_block_diagonal");
  BlockDiagonalData out{Matrix(spec.m, spec.n),
                        contiguous_partition(static_cast<std::size_t>(spec.n), spec.k),
                        contiguous_partition(static_cast<std::size_t>(spec.m), spec.k)};
  Rng rng(spec.seed);
  for (Eigen::Index i = 0; i < spec.m; ++i) {
    const int fi = out.features.labels[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < spec.n; ++j) {
      const bool inside = out.items.labels[static_cast<std::size_t>(j)] == fi;
      out.data(i, j) = inside ? rng.uniform(0.5, 1.0) : spec.noise * rng.uniform();
    }
  }
  return out;
}

MixtureDocsData gen_mixture_docs(const SyntheticSpec& spec) {
  require_kind(spec, spec.kind == SyntheticKind::mixture_docs, "gen_mixture_docs");
  const int K = spec.k;
  const Partition support = contiguous_partition(static_cast<std::size_t>(spec.m), K);
  MixtureDocsData out{Matrix(spec.m, spec.n),
                      contiguous_partition(static_cast<std::size_t>(spec.n), K)};
  Rng rng(spec.seed);

  Matrix topics = Matrix::Zero(spec.m, K);
  for (Eigen::Index i = 0; i < spec.m; ++i) {
    topics(i, support.labels[static_cast<std::size_t>(i)]) = rng.uniform(0.5, 1.0);
  }

  Matrix weights = Matrix::Zero(K, spec.n);
  for (Eigen::Index j = 0; j < spec.n; ++j) {
    const int dominant = out.items.labels[static_cast<std::size_t>(j)];
    if (K == 1) {
      weights(0, j) = 1.0;
      continue;
    }
    double total = 0.0;
    for (int g = 0; g < K; ++g) {
      if (g == dominant) continue;
      weights(g, j) = rng.uniform_open();
      total += weights(g, j);
    }
    for (int g = 0; g < K; ++g) {
      weights(g, j) = g == dominant ? 1.0 - spec.overlap : spec.overlap * weights(g, j) / total;
    }
  }

  const Matrix clean = topics * weights;
  const double mean = clean.mean();
  for (Eigen::Index i = 0; i < spec.m; ++i) {
    for (Eigen::Index j = 0; j < spec.n; ++j) {
      const double draw = rng.exponential();
      out.data(i, j) = clean(i, j) + spec.noise * mean * draw;
    }
  }
  return out;
}

PlantedGraph gen_planted_graph(const SyntheticSpec& spec) {
  const bool directed = spec.kind == SyntheticKind::directed_planted_graph;
  require_kind(spec, spec.is_graph(), "gen_planted_graph");
  const Eigen::Index n = spec.n;
  PlantedGraph out{Matrix::Zero(n, n), contiguous_partition(static_cast<std::size_t>(n), spec.k),
                   directed};
  Rng rng(spec.seed);
  auto draw = [&](Eigen::Index i, Eigen::Index j) {
    const bool inside = out.labels.labels[static_cast<std::size_t>(i)] ==
                        out.labels.labels[static_cast<std::size_t>(j)];
    return inside ? rng.uniform(0.5, 1.0) : spec.noise * rng.uniform();
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = directed ? 0 : i + 1; j < n; ++j) {
      if (i == j) continue;
      const double w = draw(i, j);
      out.weights(i, j) = w;
      if (!directed) out.weights(j, i) = w;
    }
  }
  return out;
}

SyntheticDataset generate(const SyntheticSpec& spec) {
  switch (spec.kind) {
    case SyntheticKind::block_diagonal: {
      auto d = gen_block_diagonal(spec);
      return {std::move(d.data), std::move(d.items), std::move(d.features)};
    }
    case SyntheticKind::mixture_docs: {
      auto d = gen_mixture_docs(spec);
      return {std::move(d.data), std::move(d.items), std::nullopt};
    }
    case SyntheticKind::planted_graph:
    case SyntheticKind::directed_planted_graph: {
      // Rows and columns both index vertices, so the planted labels serve
      // for either factor.
      auto g = gen_planted_graph(spec);
      Partition features = g.labels;
      return {std::move(g.weights), std::move(g.labels), std::move(features)};
    }
  }
  throw SpecError("unknown dataset kind");
}

}  // namespace nmfc
