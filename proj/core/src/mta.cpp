#include "lac/mta.hpp"

#include <algorithm>
#include <cmath>

namespace lac {

namespace {

struct Rng64 {
  std::uint64_t s;
  explicit Rng64(std::uint64_t seed) : s(seed) {}
  std::uint64_t next() {
    s += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % bound;
  }
};

Tensor attention(const Tensor& x, const MtaHeadLayer& w, double inv_sqrt_dh) {
  Tensor q = matmul(x, w.wq);
  Tensor k = matmul(x, w.wk);
  Tensor v = matmul(x, w.wv);
  Tensor probs = softmax_rows(scale(matmul(q, transpose(k)), inv_sqrt_dh));
  return matmul(matmul(probs, v), w.wo);
}

Tensor ffn(const Tensor& x, const MtaHeadLayer& w) {
  return matmul(gelu(matmul(x, w.ffn_w1)), w.ffn_w2);
}

}  // namespace

std::vector<Tensor> MtaParams::parameters() {
  std::vector<Tensor> out;
  for (auto& layer : blocks)
    for (auto& h : layer) {
      out.push_back(h.wq);
      out.push_back(h.wk);
      out.push_back(h.wv);
      out.push_back(h.wo);
      out.push_back(h.ln1_gain);
      out.push_back(h.ln1_bias);
      out.push_back(h.ln2_gain);
      out.push_back(h.ln2_bias);
      out.push_back(h.ffn_w1);
      out.push_back(h.ffn_w2);
    }
  for (auto& d : decoder) out.push_back(d);
  return out;
}

MtaParams mta_init(std::size_t embed_dim, std::size_t heads, std::size_t layers, double epsilon,
                   std::uint64_t seed) {
  if (embed_dim % 2 != 0) throw ContractError("mta_init: embedding width must be even");
  if (heads == 0 || embed_dim % heads != 0)
    throw ContractError("mta_init: head count must divide embedding width");
  MtaParams p;
  p.embed_dim = embed_dim;
  p.heads = heads;
  p.layers = layers;
  p.epsilon = epsilon;
  const std::size_t dh = p.head_dim();
  std::uint64_t ctr = seed;
  auto next_seed = [&ctr]() { return ++ctr * 0x9e3779b97f4a7c15ULL; };
  p.blocks.resize(layers);
  for (auto& layer : p.blocks) {
    layer.resize(heads);
    for (auto& h : layer) {
      h.wq = xavier_init({dh, dh}, next_seed());
      h.wk = xavier_init({dh, dh}, next_seed());
      h.wv = xavier_init({dh, dh}, next_seed());
      h.wo = xavier_init({dh, dh}, next_seed());
      h.ln1_gain = Tensor::full({dh}, 1.0, true);
      h.ln1_bias = Tensor::zeros({dh}, true);
      h.ln2_gain = Tensor::full({dh}, 1.0, true);
      h.ln2_bias = Tensor::zeros({dh}, true);
      h.ffn_w1 = xavier_init({dh, 4 * dh}, next_seed());
      h.ffn_w2 = xavier_init({4 * dh, dh}, next_seed());
    }
  }
  for (std::size_t h = 0; h < heads; ++h) p.decoder.push_back(xavier_init({dh, 1}, next_seed()));
  return p;
}

Tensor eigen_embed(const std::vector<double>& lambdas, std::size_t embed_dim, double epsilon) {
  if (embed_dim % 2 != 0) throw ContractError("eigen_embed: embedding width must be even");
  const std::size_t n = lambdas.size();
  if (n == 0) throw ContractError("eigen_embed: empty spectrum");
  const double nn = static_cast<double>(n);
  std::vector<double> d(n * embed_dim);
  for (std::size_t i = 0; i < n; ++i) {
    const double lam = lambdas[i];
    for (std::size_t j = 1; j <= embed_dim; ++j) {  // 1-based column index
      double v;
      if (j == 1) {
        v = lam;
      } else {
        const std::size_t k = j / 2;
        const double freq = epsilon * lam / std::pow(nn, 2.0 * k / embed_dim);
        v = (j % 2 == 0) ? std::sin(freq) : std::cos(freq);
      }
      d[i * embed_dim + j - 1] = v;
    }
  }
  return Tensor({n, embed_dim}, std::move(d), false);
}

Tensor mta_forward(const Tensor& z, MtaParams& params, const std::vector<double>& lambdas) {
  const std::size_t n = lambdas.size();
  if (z.ndim() != 2 || z.dim(0) != n || z.dim(1) != params.embed_dim)
    throw ShapeError("mta_forward: embedding shape does not match spectrum and params");
  if (params.mask.size() != n)
    throw ShapeError("mta_forward: mask length " + std::to_string(params.mask.size()) +
                     " does not match spectrum length " + std::to_string(n));
  const std::size_t dh = params.head_dim();
  const double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(dh));

  Tensor pooled;
  for (std::size_t h = 0; h < params.heads; ++h) {
    Tensor x = slice_cols(z, h * dh, (h + 1) * dh);
    for (std::size_t l = 0; l < params.layers; ++l) {
      const MtaHeadLayer& w = params.blocks[l][h];
      Tensor t = add(attention(layer_norm_rows(x, w.ln1_gain, w.ln1_bias), w, inv_sqrt_dh), x);
      x = add(ffn(layer_norm_rows(t, w.ln2_gain, w.ln2_bias), w), t);
    }
    Tensor decoded = tanh_t(reshape(matmul(x, params.decoder[h]), {n}));
    pooled = h == 0 ? decoded : add(pooled, decoded);
  }
  pooled = scale(pooled, 1.0 / static_cast<double>(params.heads));

  std::vector<double> keep(n), replace(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double m = params.mask[i];
    if (m != 0.0 && m != 1.0) throw ContractError("mta_forward: mask entries must be 0 or 1");
    keep[i] = 1.0 - m;
    replace[i] = m;
  }
  Tensor lam_c({n}, std::vector<double>(lambdas));
  Tensor keep_c({n}, std::move(keep));
  Tensor replace_c({n}, std::move(replace));
  return add(mul(keep_c, lam_c), mul(replace_c, pooled));
}

MaskStrategy parse_mask_strategy(const std::string& name) {
  if (name == "random") return MaskStrategy::kRandom;
  if (name == "low_band") return MaskStrategy::kLowBand;
  if (name == "mid_band") return MaskStrategy::kMidBand;
  if (name == "high_band") return MaskStrategy::kHighBand;
  throw ContractError("unknown mask strategy '" + name + "'");
}

std::vector<double> build_mask(std::size_t n, double mask_ratio, MaskStrategy strategy,
                               std::uint64_t seed) {
  if (mask_ratio < 0.0 || mask_ratio > 1.0)
    throw ContractError("build_mask: mask_ratio must lie in [0, 1]");
  const auto k = static_cast<std::size_t>(std::llround(mask_ratio * static_cast<double>(n)));
  std::vector<double> mask(n, 0.0);
  switch (strategy) {
    case MaskStrategy::kLowBand:
      for (std::size_t i = 0; i < k; ++i) mask[i] = 1.0;
      break;
    case MaskStrategy::kHighBand:
      for (std::size_t i = n - k; i < n; ++i) mask[i] = 1.0;
      break;
    case MaskStrategy::kMidBand:
      for (std::size_t i = (n - k) / 2; i < (n - k) / 2 + k; ++i) mask[i] = 1.0;
      break;
    case MaskStrategy::kRandom: {
      std::vector<std::size_t> idx(n);
      for (std::size_t i = 0; i < n; ++i) idx[i] = i;
      Rng64 rng(seed);
      for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
      for (std::size_t i = 0; i < k; ++i) mask[idx[i]] = 1.0;
      break;
    }
  }
  return mask;
}

}  // namespace lac
