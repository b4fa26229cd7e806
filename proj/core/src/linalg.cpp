#include "lac/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace lac {

namespace {
constexpr std::size_t kKBlock = 240;
constexpr std::size_t kJBlock = 1024;
}  // namespace

void gemm(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
          double* c) {
  std::memset(c, 0, m * n * sizeof(double));
  for (std::size_t kb = 0; kb < k; kb += kKBlock) {
    const std::size_t kend = std::min(k, kb + kKBlock);
    for (std::size_t jb = 0; jb < n; jb += kJBlock) {
      const std::size_t jend = std::min(n, jb + kJBlock);
      for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t kk = kb; kk < kend; ++kk) {
          const double aik = arow[kk];
          if (aik == 0.0) continue;
          const double* brow = b + kk * n;
          for (std::size_t j = jb; j < jend; ++j) crow[j] += aik * brow[j];
        }
      }
    }
  }
}

void gemm_nt_acc(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
                 double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    double* crow = c + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = b + j * k;
      double acc = 0.0;
      for (std::size_t kk = 0; kk < k; ++kk) acc += arow[kk] * brow[kk];
      crow[j] += acc;
    }
  }
}

void gemm_tn_acc(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
                 double* c) {
  for (std::size_t kk = 0; kk < k; ++kk) {
    const double* arow = a + kk * m;
    const double* brow = b + kk * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double aki = arow[i];
      if (aki == 0.0) continue;
      double* crow = c + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aki * brow[j];
    }
  }
}

Mat matmul(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows())
    throw ShapeError("matmul: inner dimensions disagree: " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
  Mat c(a.rows(), b.cols());
  gemm(a.rows(), a.cols(), b.cols(), a.data(), b.data(), c.data());
  return c;
}

double max_abs_diff(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.vec().size(); ++i) m = std::max(m, std::fabs(a.vec()[i] - b.vec()[i]));
  return m;
}

double max_abs(const Mat& a) {
  double m = 0.0;
  for (double v : a.vec()) m = std::max(m, std::fabs(v));
  return m;
}

}  // namespace lac
