#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "lac/encoder.hpp"
#include "lac/linalg.hpp"
#include "lac/mta.hpp"
#include "lac/spectral.hpp"
#include "lac/tensor.hpp"

namespace {

std::uint64_t g_state = 0x1234abcdULL;
double next_uniform() {
  g_state ^= g_state << 13;
  g_state ^= g_state >> 7;
  g_state ^= g_state << 17;
  return 2.0 * (static_cast<double>(g_state >> 11) / 9007199254740992.0) - 1.0;
}

lac::Mat random_mat(std::size_t r, std::size_t c) {
  lac::Mat m(r, c);
  for (auto& x : m.vec()) x = next_uniform();
  return m;
}

lac::Mat random_symmetric(std::size_t n) {
  lac::Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = next_uniform();
  return m;
}

void bm_gemm(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  lac::Mat a = random_mat(n, n), b = random_mat(n, n), c(n, n);
  for (auto _ : state) {
    lac::gemm(n, n, n, a.vec().data(), b.vec().data(), c.vec().data());
    benchmark::DoNotOptimize(c.vec().data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(2 * n * n * n));
}
BENCHMARK(bm_gemm)->Arg(128)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void bm_eig_sym(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  lac::Mat a = random_symmetric(n);
  for (auto _ : state) {
    auto [vecs, vals] = lac::eig_sym(a);
    benchmark::DoNotOptimize(vals.data());
  }
}
BENCHMARK(bm_eig_sym)->Arg(64)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void bm_mta_forward(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<double> lambdas(n);
  for (auto& x : lambdas) x = next_uniform();
  std::sort(lambdas.begin(), lambdas.end());
  lac::MtaParams params = lac::mta_init(16, 2, 1, 100.0, 11);
  params.mask = lac::build_mask(n, 0.5, lac::MaskStrategy::kRandom, 12);
  lac::Tensor z = lac::eigen_embed(lambdas, 16, 100.0);
  lac::NoGradGuard ng;
  for (auto _ : state) {
    lac::Tensor out = lac::mta_forward(z, params, lambdas);
    benchmark::DoNotOptimize(out.data().data());
  }
}
BENCHMARK(bm_mta_forward)->Arg(256)->Arg(1024)->Arg(2708)->Unit(benchmark::kMillisecond);

void bm_gcn_forward(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0)), d = 64;
  lac::Mat adj = random_symmetric(n);
  for (auto& x : adj.vec()) x = x > 0.9 ? 1.0 : 0.0;
  lac::Tensor a = lac::Tensor::from_mat(adj);
  lac::Tensor x = lac::Tensor::from_mat(random_mat(n, d));
  lac::EncoderParams enc = lac::encoder_init({d, 256, 256}, 13);
  lac::NoGradGuard ng;
  for (auto _ : state) {
    lac::Tensor z = lac::gcn_forward(a, x, enc);
    benchmark::DoNotOptimize(z.data().data());
  }
}
BENCHMARK(bm_gcn_forward)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
