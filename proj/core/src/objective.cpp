#include "lac/objective.hpp"

namespace lac {

Tensor info_nce(const Tensor& z_a, const Tensor& z_b, double tau, bool symmetrized) {
  if (tau <= 0.0) throw ContractError("info_nce: temperature must be positive");
  if (z_a.ndim() != 2 || z_a.shape() != z_b.shape())
    throw ShapeError("info_nce: embedding sets must share an n x e shape");
  const auto n = static_cast<double>(z_a.dim(0));

  Tensor sim = scale(matmul(row_l2_normalize(z_a), transpose(row_l2_normalize(z_b))), 1.0 / tau);
  Tensor pos = diag_part(sim);
  Tensor total = sum(sub(pos, logsumexp_rows(sim)));
  if (symmetrized) {
    total = add(total, sum(sub(pos, logsumexp_rows(transpose(sim)))));
    return scale(total, 1.0 / (2.0 * n));
  }
  return scale(total, 1.0 / n);
}

Tensor augmenter_loss(const Tensor& z, const Tensor& z_aug, const Tensor& lam,
                      const Tensor& lam_aug, const Tensor& c, const Tensor& c_aug,
                      const LossConfig& cfg) {
  Tensor loss = info_nce(z, z_aug, cfg.tau, cfg.symmetrized);
  if (cfg.alpha != 0.0) {
    Tensor dl = sub(lam, lam_aug);
    Tensor dc = sub(c, c_aug);
    Tensor consistency = add(sum(mul(dl, dl)), sum(mul(dc, dc)));
    loss = add(loss, scale(consistency, cfg.alpha));
  }
  return loss;
}

Tensor encoder_loss(const Tensor& z, const Tensor& z_aug, const Tensor& z_aux_orig,
                    const Tensor& z_aux_view, const LossConfig& cfg) {
  Tensor loss = info_nce(z, z_aug, cfg.tau, cfg.symmetrized);
  if (cfg.beta != 0.0) {
    Tensor bottleneck = add(info_nce(z_aug, z_aux_view, cfg.tau, cfg.symmetrized),
                            info_nce(z, z_aux_orig, cfg.tau, cfg.symmetrized));
    loss = add(loss, scale(bottleneck, cfg.beta));
  }
  return loss;
}

}  // namespace lac
