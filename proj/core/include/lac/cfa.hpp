#pragma once

#include <cstdint>
#include <vector>

#include "lac/tensor.hpp"

namespace lac {

/// Cross-channel Feature Augmentation: one d x d kernel shared by all nodes.
struct CfaKernel {
  Tensor k;  // d x d, learnable

  std::vector<Tensor> parameters() { return {k}; }
};

/// Identity plus small Xavier noise, so training starts near the no-op
/// augmentation.
CfaKernel cfa_init(std::size_t dim, std::uint64_t seed, double noise_scale = 0.01);

/// C'_{i,l} = sum_j C_{i,j} K_{l,j}, i.e. C' = C K^T.
Tensor cfa_forward(const Tensor& c, const CfaKernel& kernel);

/// Per-channel root-mean-square of the coefficient columns; the long-tail
/// diagnostic for dimensional collapse.
std::vector<double> channel_energy(const Mat& c);

}  // namespace lac
