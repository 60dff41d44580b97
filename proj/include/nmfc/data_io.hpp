#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>

#include "nmfc/metrics.hpp"
#include "nmfc/model.hpp"

namespace nmfc {

// ---------------------------------------------------------------------------
// Files

/// Reads `%%MatrixMarket matrix coordinate real general` (1-based indices,
/// unlisted entries are zero) or `array real general` (column-major).
Matrix read_matrix_market(const std::filesystem::path& path);
Matrix parse_matrix_market(std::istream& in);

/// Coordinate format when fewer than half the entries are nonzero, array
/// format otherwise; values printed with 17 significant digits.
void write_matrix_market(const std::filesystem::path& path, const Matrix& m);
void format_matrix_market(std::ostream& out, const Matrix& m);

/// Rectangular comma-separated floats, no header.
Matrix read_csv_matrix(const std::filesystem::path& path);
Matrix parse_csv_matrix(std::istream& in);
void write_csv_matrix(const std::filesystem::path& path, const Matrix& m);

/// One integer per line; labels are re-indexed to [0, K) in order of first
/// appearance.
Partition read_labels(const std::filesystem::path& path);
Partition parse_labels(std::istream& in);
void write_labels(const std::filesystem::path& path, const Partition& partition);

/// Dispatches on extension: `.mtx` is MatrixMarket, anything else CSV.
Matrix read_matrix(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Synthetic data

enum class SyntheticKind { block_diagonal, mixture_docs, planted_graph, directed_planted_graph };

std::string_view to_string(SyntheticKind kind);
SyntheticKind parse_synthetic_kind(std::string_view text);

struct SyntheticSpec {
  Eigen::Index m = 0;  // features; ignored by the graph kinds
  Eigen::Index n = 0;  // items, or vertices for graph kinds
  int k = 2;
  double noise = 0.0;    // in [0, 1)
  double overlap = 0.0;  // mixture-docs: weight spread over non-dominant topics
  std::uint64_t seed = 0;
  SyntheticKind kind = SyntheticKind::block_diagonal;

  bool is_graph() const {
    return kind == SyntheticKind::planted_graph || kind == SyntheticKind::directed_planted_graph;
  }
  /// Throws SpecError naming the violated bound.
  void validate() const;
};

struct BlockDiagonalData {
  Matrix data;
  Partition items;
  Partition features;
};

/// Contiguous feature and item groups; in-block entries U[0.5, 1], off-block
/// entries U[0, noise].
BlockDiagonalData gen_block_diagonal(const SyntheticSpec& spec);

struct MixtureDocsData {
  Matrix data;
  Partition items;
};

/// K topics with disjoint contiguous feature supports. Each item mixes its
/// dominant topic with weight 1 - overlap and the others with random weights
/// summing to overlap, then adds noise * mean * Exp(1) per entry.
MixtureDocsData gen_mixture_docs(const SyntheticSpec& spec);

struct PlantedGraph {
  Matrix weights;  // n x n, zero diagonal
  Partition labels;
  bool directed = false;
};

/// Planted partition graph: within-cluster weights U[0.5, 1], cross-cluster
/// U[0, noise]. Undirected graphs draw each unordered pair once; directed
/// graphs draw each ordered pair independently.
PlantedGraph gen_planted_graph(const SyntheticSpec& spec);

struct SyntheticDataset {
  Matrix data;  // graph kinds: the weight matrix as generated (V for directed)
  std::optional<Partition> items;
  std::optional<Partition> features;
};

SyntheticDataset generate(const SyntheticSpec& spec);

}  // namespace nmfc
