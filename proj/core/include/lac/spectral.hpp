#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lac/graph.hpp"
#include "lac/linalg.hpp"
#include "lac/tensor.hpp"

namespace lac {

/// A graph expressed in the orthogonal continuous space: eigenvector basis U,
/// ascending eigenvalues of the normalized adjacency, and spectral feature
/// coefficients C = U^T X.
struct SpectralView {
  Mat u;                        // n x n orthonormal columns
  std::vector<double> lambdas;  // ascending
  Mat c;                        // n x d
};

/// Symmetric eigendecomposition. Eigenvalues ascending; eigenvectors are the
/// columns of the returned matrix with the first nonzero component of each
/// made positive. Throws ContractError on asymmetric input and NumericError
/// when the iteration cap is hit.
std::pair<Mat, std::vector<double>> eig_sym(const Mat& s);

/// Decomposes the graph's normalized adjacency once and projects the features.
SpectralView to_spectral_view(const Graph& g, bool raw_adjacency = false);

/// Converts an augmented spectrum and coefficient matrix back to the discrete
/// space: A' = U diag(lambda') U^T, X' = U C'. Differentiable through the tape
/// in lambdas_aug and c_aug; u is treated as a constant basis.
std::pair<Tensor, Tensor> reconstruct(const Mat& u, const Tensor& lambdas_aug,
                                      const Tensor& c_aug);

/// First-order total eigenvalue drift from flipping edge (p, q):
/// sum_i |2 u_ip u_iq - lambda_i (u_ip^2 + u_iq^2)|.
double edge_flip_delta(const SpectralView& view, std::size_t p, std::size_t q);

/// Node-removal perturbation: edge_flip_delta summed over the node's
/// neighbors in the given adjacency.
double node_removal_delta(const SpectralView& view, const Mat& adjacency, std::size_t node);

/// Binary cache of (U, lambdas, C) keyed by a dataset hash.
void save_spectral_cache(const std::string& path, const SpectralView& view, std::uint64_t hash);
bool load_spectral_cache(const std::string& path, std::uint64_t hash, SpectralView& out);

/// FNV-1a over the adjacency and feature bytes; keys the spectral cache.
std::uint64_t dataset_hash(const Graph& g);

}  // namespace lac
