#include "lac/cfa.hpp"

#include <cmath>

namespace lac {

CfaKernel cfa_init(std::size_t dim, std::uint64_t seed, double noise_scale) {
  Tensor noise = xavier_init({dim, dim}, seed, false);
  std::vector<double> d(dim * dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      d[i * dim + j] = (i == j ? 1.0 : 0.0) + noise_scale * noise.at(i, j);
  CfaKernel k;
  k.k = Tensor({dim, dim}, std::move(d), true);
  return k;
}

Tensor cfa_forward(const Tensor& c, const CfaKernel& kernel) {
  if (c.ndim() != 2 || kernel.k.ndim() != 2 || kernel.k.dim(0) != kernel.k.dim(1) ||
      c.dim(1) != kernel.k.dim(0))
    throw ShapeError("cfa_forward: kernel must be square with side equal to feature dim");
  return matmul(c, transpose(kernel.k));
}

std::vector<double> channel_energy(const Mat& c) {
  const std::size_t n = c.rows(), d = c.cols();
  std::vector<double> energy(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) energy[j] += c(i, j) * c(i, j);
  for (auto& e : energy) e = std::sqrt(e / static_cast<double>(n));
  return energy;
}

}  // namespace lac
