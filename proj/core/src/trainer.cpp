#include "lac/trainer.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "lac/objective.hpp"

namespace lac {
namespace {

void set_requires_grad(std::vector<Tensor>& params, bool value) {
  for (Tensor& p : params) p.node()->requires_grad = value;
}

void check_finite(double value, const char* what, std::size_t epoch) {
  if (!std::isfinite(value)) {
    throw NumericError(std::string(what) + " went non-finite at epoch " +
                       std::to_string(epoch));
  }
}

double frobenius_drift(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

TrainConfig TrainConfig::from_config(const Config& cfg) {
  TrainConfig tc;
  tc.max_epochs = cfg.get_size("train.max_epochs");
  tc.lr_encoder = cfg.get_double("train.lr_encoder");
  tc.lr_augmenter = cfg.get_double("train.lr_augmenter");
  tc.alpha = cfg.get_double("train.alpha");
  tc.beta = cfg.get_double("train.beta");
  tc.tau = cfg.get_double("train.tau");
  tc.symmetrized = cfg.get_bool("train.symmetrized");
  tc.augmenter_maximizes = cfg.get_bool("train.augmenter_maximizes");
  tc.inner_steps_encoder = cfg.get_size("train.inner_steps_encoder");
  tc.inner_steps_augmenter = cfg.get_size("train.inner_steps_augmenter");
  tc.mta_embed_dim = cfg.get_size("mta.embed_dim");
  tc.mta_heads = cfg.get_size("mta.heads");
  tc.mta_layers = cfg.get_size("mta.layers");
  tc.mta_epsilon = cfg.get_double("mta.epsilon");
  tc.mask_ratio = cfg.get_double("mta.mask_ratio");
  tc.mask_strategy = parse_mask_strategy(cfg.get_string("mta.mask_strategy"));
  tc.hidden_dim = cfg.get_size("encoder.hidden_dim");
  tc.out_dim = cfg.get_size("encoder.out_dim");
  tc.seed = cfg.get_u64("train.seed");
  if (tc.tau <= 0) throw ContractError("train.tau must be positive");
  if (tc.alpha < 0 || tc.beta < 0) {
    throw ContractError("train.alpha and train.beta must be non-negative");
  }
  if (tc.mask_ratio < 0 || tc.mask_ratio > 1) {
    throw ContractError("mta.mask_ratio must lie in [0, 1]");
  }
  return tc;
}

TrainResult train(const Graph& g, const TrainConfig& cfg) {
  return train(g, to_spectral_view(g), cfg);
}

TrainResult init_state(std::size_t n, std::size_t d, const TrainConfig& cfg) {
  TrainResult result;
  result.mta = mta_init(cfg.mta_embed_dim, cfg.mta_heads, cfg.mta_layers,
                        cfg.mta_epsilon, cfg.seed * 1000003u + 1);
  result.mta.mask = build_mask(n, cfg.mask_ratio, cfg.mask_strategy, cfg.seed * 1000003u + 2);
  result.cfa = cfa_init(d, cfg.seed * 1000003u + 3);
  const std::vector<std::size_t> dims = {d, cfg.hidden_dim, cfg.out_dim};
  result.encoder = encoder_init(dims, cfg.seed * 1000003u + 4);
  result.aux_encoder = encoder_init(dims, cfg.seed * 1000003u + 5);
  return result;
}

TrainResult train(const Graph& g, const SpectralView& view, const TrainConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = g.n;
  const std::size_t d = g.features.cols();

  TrainResult result = init_state(n, d, cfg);

  // Constant inputs, shared across all epochs.
  const Tensor a_raw = Tensor::from_mat(g.adjacency);
  const Tensor x = Tensor::from_mat(g.features);
  const Tensor c0 = Tensor::from_mat(view.c);
  const Tensor lam0{{n}, view.lambdas};
  const Tensor z_embed = eigen_embed(view.lambdas, cfg.mta_embed_dim, cfg.mta_epsilon);

  LossConfig loss_cfg;
  loss_cfg.tau = cfg.tau;
  loss_cfg.alpha = cfg.alpha;
  loss_cfg.beta = cfg.beta;
  loss_cfg.symmetrized = cfg.symmetrized;

  std::vector<Tensor> encoder_params = result.encoder.parameters();
  {
    auto aux = result.aux_encoder.parameters();
    encoder_params.insert(encoder_params.end(), aux.begin(), aux.end());
  }
  std::vector<Tensor> augmenter_params = result.mta.parameters();
  {
    auto cp = result.cfa.parameters();
    augmenter_params.insert(augmenter_params.end(), cp.begin(), cp.end());
  }
  std::vector<Tensor> f_only = result.encoder.parameters();

  AdamState opt_encoder(cfg.lr_encoder);
  AdamState opt_augmenter(cfg.lr_augmenter);

  // Forward-only augmented view with the current augmenter parameters.
  auto augment_detached = [&]() -> std::pair<Tensor, Tensor> {
    NoGradGuard ng;
    Tensor lam_aug = mta_forward(z_embed, result.mta, view.lambdas);
    Tensor c_aug = cfa_forward(c0, result.cfa);
    return reconstruct(view.u, lam_aug, c_aug);
  };

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    EpochRecord rec;
    rec.epoch = epoch;

    // Phase A: the augmenter is frozen; its view enters as plain data.
    const auto [a_aug_fixed, x_aug_fixed] = augment_detached();
    for (std::size_t step = 0; step < cfg.inner_steps_encoder; ++step) {
      Tensor z = gcn_forward(a_raw, x, result.encoder);
      Tensor z_aug = gcn_forward(a_aug_fixed, x_aug_fixed, result.encoder);
      Tensor z_aux_orig = gcn_forward(a_raw, x, result.aux_encoder);
      Tensor z_aux_view = gcn_forward(a_aug_fixed, x_aug_fixed, result.aux_encoder);
      Tensor objective = encoder_loss(z, z_aug, z_aux_orig, z_aux_view, loss_cfg);
      rec.encoder_objective = objective.item();
      check_finite(rec.encoder_objective, "encoder objective", epoch);
      backward(scale(objective, -1.0));
      adam_step(encoder_params, opt_encoder);
    }

    // Phase B: the encoder is frozen; gradients flow only into the augmenter.
    Tensor z_fixed;
    {
      NoGradGuard ng;
      z_fixed = gcn_forward(a_raw, x, result.encoder);
    }
    set_requires_grad(encoder_params, false);
    for (std::size_t step = 0; step < cfg.inner_steps_augmenter; ++step) {
      Tensor lam_aug = mta_forward(z_embed, result.mta, view.lambdas);
      Tensor c_aug = cfa_forward(c0, result.cfa);
      auto [a_aug, x_aug] = reconstruct(view.u, lam_aug, c_aug);
      Tensor z_aug = gcn_forward(a_aug, x_aug, result.encoder);

      Tensor diversity = info_nce(z_fixed, z_aug, cfg.tau, cfg.symmetrized);
      Tensor lam_diff = sub(lam_aug, lam0);
      Tensor c_diff = sub(c_aug, c0);
      Tensor consistency =
          add(sum(mul(lam_diff, lam_diff)), sum(mul(c_diff, c_diff)));
      Tensor total = add(cfg.augmenter_maximizes ? scale(diversity, -1.0) : diversity,
                         scale(consistency, cfg.alpha));
      rec.augmenter_objective = total.item();
      rec.consistency = consistency.item();
      check_finite(rec.augmenter_objective, "augmenter objective", epoch);
      {
        NoGradGuard ng;
        rec.lambda_drift = frobenius_drift(lam_aug.data(), view.lambdas);
        rec.coeff_drift = frobenius_drift(c_aug.data(), c0.data());
        if (step + 1 == cfg.inner_steps_augmenter) {
          result.lambdas_aug = lam_aug.data();
          result.c_aug = c_aug.to_mat();
        }
      }
      backward(total);
      adam_step(augmenter_params, opt_augmenter);
    }
    set_requires_grad(encoder_params, true);

    result.history.push_back(rec);
  }

  // Final embeddings under the trained parameters.
  {
    NoGradGuard ng;
    Tensor lam_aug = mta_forward(z_embed, result.mta, view.lambdas);
    Tensor c_aug = cfa_forward(c0, result.cfa);
    auto [a_aug, x_aug] = reconstruct(view.u, lam_aug, c_aug);
    result.z = gcn_forward(a_raw, x, result.encoder).to_mat();
    result.z_aug = gcn_forward(a_aug, x_aug, result.encoder).to_mat();
    result.lambdas_aug = lam_aug.data();
    result.c_aug = c_aug.to_mat();
  }

  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

NamedTensors named_parameters(TrainResult& result) {
  NamedTensors out;
  auto add_encoder = [&out](const std::string& prefix, EncoderParams& enc) {
    for (std::size_t k = 0; k < enc.weights.size(); ++k) {
      out.emplace_back(prefix + ".w" + std::to_string(k), enc.weights[k]);
    }
    for (std::size_t k = 0; k < enc.slopes.size(); ++k) {
      out.emplace_back(prefix + ".slope" + std::to_string(k), enc.slopes[k]);
    }
  };
  add_encoder("encoder", result.encoder);
  add_encoder("aux_encoder", result.aux_encoder);
  for (std::size_t l = 0; l < result.mta.blocks.size(); ++l) {
    for (std::size_t h = 0; h < result.mta.blocks[l].size(); ++h) {
      const std::string p =
          "mta.l" + std::to_string(l) + ".h" + std::to_string(h) + ".";
      MtaHeadLayer& layer = result.mta.blocks[l][h];
      out.emplace_back(p + "wq", layer.wq);
      out.emplace_back(p + "wk", layer.wk);
      out.emplace_back(p + "wv", layer.wv);
      out.emplace_back(p + "wo", layer.wo);
      out.emplace_back(p + "ln1_gain", layer.ln1_gain);
      out.emplace_back(p + "ln1_bias", layer.ln1_bias);
      out.emplace_back(p + "ln2_gain", layer.ln2_gain);
      out.emplace_back(p + "ln2_bias", layer.ln2_bias);
      out.emplace_back(p + "ffn_w1", layer.ffn_w1);
      out.emplace_back(p + "ffn_w2", layer.ffn_w2);
    }
  }
  for (std::size_t h = 0; h < result.mta.decoder.size(); ++h) {
    out.emplace_back("mta.decoder" + std::to_string(h), result.mta.decoder[h]);
  }
  out.emplace_back("cfa.kernel", result.cfa.k);
  return out;
}

}  // namespace lac
