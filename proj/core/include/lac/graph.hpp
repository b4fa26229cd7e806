#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lac/linalg.hpp"

namespace lac {

/// Undirected simple graph with dense 0/1 adjacency, node features, and
/// optional class labels.
struct Graph {
  std::size_t n = 0;
  Mat adjacency;            // n x n, symmetric, zero diagonal
  Mat features;             // n x d
  std::vector<int> labels;  // empty when absent
  std::string name;

  std::size_t feature_dim() const { return features.cols(); }
  std::size_t undirected_edge_count() const;
};

struct Split {
  std::vector<std::size_t> train, val, test;
  std::uint64_t seed = 0;
};

/// Reads one "u v" pair per line (edge list), a CSV feature matrix, and an
/// optional one-label-per-line file. Node ids must be 0-based and within the
/// feature row count. The adjacency is mirrored; self-loops are dropped.
Graph load_graph(const std::string& edge_path, const std::string& feature_path,
                 const std::optional<std::string>& label_path = std::nullopt);

void save_graph(const Graph& g, const std::string& edge_path, const std::string& feature_path,
                const std::optional<std::string>& label_path = std::nullopt);

/// D^(-1/2) (A + I) D^(-1/2); symmetric, eigenvalues in [-1, 1].
Mat normalize_adjacency(const Graph& g);

/// Normalized Laplacian I - normalize_adjacency(g). Diagnostic only.
Mat normalized_laplacian(const Graph& g);

/// Seeded uniform shuffle followed by contiguous slicing.
Split make_splits(std::size_t n, double train_frac, double val_frac, std::uint64_t seed);

}  // namespace lac
