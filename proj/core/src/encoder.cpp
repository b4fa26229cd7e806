#include "lac/encoder.hpp"

namespace lac {

std::vector<Tensor> EncoderParams::parameters() {
  std::vector<Tensor> out = weights;
  for (auto& s : slopes) out.push_back(s);
  return out;
}

EncoderParams encoder_init(const std::vector<std::size_t>& dims, std::uint64_t seed) {
  if (dims.size() < 2) throw ContractError("encoder_init: need at least one layer");
  EncoderParams p;
  std::uint64_t ctr = seed;
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    p.weights.push_back(xavier_init({dims[k], dims[k + 1]}, ++ctr * 0x9e3779b97f4a7c15ULL));
    if (k + 2 < dims.size()) p.slopes.push_back(Tensor::full({1}, 0.25, true));
  }
  return p;
}

Tensor gcn_forward(const Tensor& adjacency, const Tensor& x, EncoderParams& params) {
  if (adjacency.ndim() != 2 || adjacency.dim(0) != adjacency.dim(1))
    throw ShapeError("gcn_forward: adjacency must be square");
  if (x.ndim() != 2 || x.dim(0) != adjacency.dim(0))
    throw ShapeError("gcn_forward: feature row count must match adjacency");
  if (params.weights.empty() || params.weights[0].dim(0) != x.dim(1))
    throw ShapeError("gcn_forward: first layer width does not match feature dim");

  Tensor p = normalize_adj(adjacency);
  Tensor h = x;
  for (std::size_t k = 0; k < params.weights.size(); ++k) {
    h = matmul(p, matmul(h, params.weights[k]));
    if (k + 1 < params.weights.size()) h = prelu(h, params.slopes[k]);
  }
  return h;
}

}  // namespace lac
