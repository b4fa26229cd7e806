#pragma once

#include "lac/tensor.hpp"

namespace lac {

struct LossConfig {
  double tau = 0.5;    // InfoNCE temperature, > 0
  double alpha = 0.5;  // consistency weight, >= 0
  double beta = 0.5;   // bottleneck weight, >= 0
  bool symmetrized = true;
};

/// Symmetrized InfoNCE mutual-information estimate between node-aligned
/// embedding sets: (1/2n) sum_i [log softmax_i(row i) + log softmax_i(col i)]
/// over the cosine-similarity matrix scaled by 1/tau. Negatives are the other
/// view's rows; each log term is <= 0.
Tensor info_nce(const Tensor& z_a, const Tensor& z_b, double tau, bool symmetrized = true);

/// Augmenter objective (minimized): diversity term info_nce(Z, Z') plus
/// alpha * (||lam - lam'||_F^2 + ||C - C'||_F^2).
Tensor augmenter_loss(const Tensor& z, const Tensor& z_aug, const Tensor& lam,
                      const Tensor& lam_aug, const Tensor& c, const Tensor& c_aug,
                      const LossConfig& cfg);

/// Encoder objective (to be MAXIMIZED; the trainer negates):
/// info_nce(Z, Z') + beta * (info_nce(Z', Z_aux_view) + info_nce(Z, Z_aux_orig)).
Tensor encoder_loss(const Tensor& z, const Tensor& z_aug, const Tensor& z_aux_orig,
                    const Tensor& z_aux_view, const LossConfig& cfg);

}  // namespace lac
