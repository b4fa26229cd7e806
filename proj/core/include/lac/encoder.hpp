#pragma once

#include <cstdint>
#include <vector>

#include "lac/tensor.hpp"

namespace lac {

/// K-layer GCN parameter set: one weight per layer plus a learnable PReLU
/// slope per hidden layer.
struct EncoderParams {
  std::vector<Tensor> weights;  // layer k: d_k x d_{k+1}
  std::vector<Tensor> slopes;   // one scalar per hidden layer

  std::vector<Tensor> parameters();
};

/// dims chains input -> hidden... -> embedding, e.g. {1433, 256, 256}.
EncoderParams encoder_init(const std::vector<std::size_t>& dims, std::uint64_t seed);

/// H^{k+1} = act(P H^k W^k) with P the symmetric degree-normalization of
/// (adjacency + I), degrees taken over |adjacency| + I so real-valued
/// augmented adjacencies stay well-posed. PReLU between layers, identity on
/// the last. Differentiable in the adjacency, features, and weights.
Tensor gcn_forward(const Tensor& adjacency, const Tensor& x, EncoderParams& params);

}  // namespace lac
