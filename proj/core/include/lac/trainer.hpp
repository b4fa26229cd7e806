#pragma once

#include <cstdint>
#include <vector>

#include "lac/cfa.hpp"
#include "lac/checkpoint.hpp"
#include "lac/config.hpp"
#include "lac/encoder.hpp"
#include "lac/graph.hpp"
#include "lac/mta.hpp"
#include "lac/spectral.hpp"

namespace lac {

struct TrainConfig {
  std::size_t max_epochs = 20;
  double lr_encoder = 1e-3;
  double lr_augmenter = 5e-3;
  double alpha = 0.1;
  double beta = 0.5;
  double tau = 0.5;
  bool symmetrized = true;
  /// Sign of the augmenter's diversity term: false = adversarial
  /// minimization (the default), true = cooperative maximization.
  bool augmenter_maximizes = false;
  std::size_t inner_steps_encoder = 1;
  std::size_t inner_steps_augmenter = 1;
  std::size_t mta_embed_dim = 16;
  std::size_t mta_heads = 2;
  std::size_t mta_layers = 1;
  double mta_epsilon = 100.0;
  double mask_ratio = 0.5;
  MaskStrategy mask_strategy = MaskStrategy::kRandom;
  std::size_t hidden_dim = 256;
  std::size_t out_dim = 256;
  std::uint64_t seed = 1;

  static TrainConfig from_config(const Config& cfg);
};

struct EpochRecord {
  std::size_t epoch = 0;
  double encoder_objective = 0.0;    // mutual-information estimate (maximized)
  double augmenter_objective = 0.0;  // augmenter phase total (as optimized)
  double consistency = 0.0;          // unweighted drift penalty
  double lambda_drift = 0.0;         // ||lam - lam'||_F
  double coeff_drift = 0.0;          // ||C - C'||_F
};

struct TrainResult {
  EncoderParams encoder;
  EncoderParams aux_encoder;
  MtaParams mta;
  CfaKernel cfa;
  Mat z;      // embeddings of the original view
  Mat z_aug;  // embeddings of the augmented view
  std::vector<double> lambdas_aug;
  Mat c_aug;
  std::vector<EpochRecord> history;
  double wall_seconds = 0.0;
};

/// Alternating min-max optimization: per epoch, (a) freeze the augmenter,
/// build the augmented view without tape, and ascend the encoder's
/// information objective; (b) freeze the encoder and descend the augmenter's
/// diversity-plus-consistency objective. Deterministic per seed. Throws
/// NumericError when any recorded loss goes non-finite.
TrainResult train(const Graph& g, const SpectralView& view, const TrainConfig& cfg);

/// Convenience overload that decomposes the graph itself.
TrainResult train(const Graph& g, const TrainConfig& cfg);

/// Freshly initialized parameters for an n-node, d-feature problem, exactly
/// as train() would start. Lets a checkpoint be restored into a state with
/// matching shapes and mask.
TrainResult init_state(std::size_t n, std::size_t d, const TrainConfig& cfg);

/// All learnable tensors of a training state, named for checkpointing.
NamedTensors named_parameters(TrainResult& result);

}  // namespace lac
