#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lac/tensor.hpp"

namespace lac {

/// One pre-LN transformer layer of a single head-stream (width D/H).
struct MtaHeadLayer {
  Tensor wq, wk, wv, wo;  // (D/H) x (D/H)
  Tensor ln1_gain, ln1_bias, ln2_gain, ln2_bias;
  Tensor ffn_w1, ffn_w2;  // (D/H) x 4(D/H), 4(D/H) x (D/H)
};

/// Masked Topology Augmentation parameters. Heads partition the embedding
/// dimension into independent transformer streams; each head owns a decoder
/// vector. The 0/1 mask selects which eigenvalues may be rewritten.
struct MtaParams {
  std::size_t embed_dim = 128;  // D, even
  std::size_t heads = 2;        // H, divides D
  std::size_t layers = 1;       // L
  double epsilon = 100.0;
  std::vector<std::vector<MtaHeadLayer>> blocks;  // [layer][head]
  std::vector<Tensor> decoder;                    // per head, (D/H) x 1
  std::vector<double> mask;                       // length n, entries in {0,1}

  std::size_t head_dim() const { return embed_dim / heads; }
  std::vector<Tensor> parameters();
};

MtaParams mta_init(std::size_t embed_dim, std::size_t heads, std::size_t layers, double epsilon,
                   std::uint64_t seed);

/// Sinusoidal eigenvalue embedding: column 1 carries the eigenvalue itself,
/// even columns sin(eps*l / N^(2k/D)), odd columns (>=3) cos of the same
/// argument, with k = floor(j/2) for 1-based column j. Returns a constant
/// n x D tensor.
Tensor eigen_embed(const std::vector<double>& lambdas, std::size_t embed_dim, double epsilon);

/// Full MTA pass: per-head pre-LN self-attention and FFN stacks, per-head
/// tanh decoding, mean pooling across heads, and the masked blend
/// lambda'_i = (1-m_i) lambda_i + m_i * pooled_i. Unmasked entries come out
/// bitwise equal to the input spectrum.
Tensor mta_forward(const Tensor& z, MtaParams& params, const std::vector<double>& lambdas);

enum class MaskStrategy { kRandom, kLowBand, kMidBand, kHighBand };

MaskStrategy parse_mask_strategy(const std::string& name);

/// Exactly round(mask_ratio * n) ones. Band strategies mask a contiguous
/// range of the ascending spectrum; random masks a seeded uniform subset.
std::vector<double> build_mask(std::size_t n, double mask_ratio, MaskStrategy strategy,
                               std::uint64_t seed);

}  // namespace lac
