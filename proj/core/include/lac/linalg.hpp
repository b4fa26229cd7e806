#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace lac {

struct ContractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeError : ContractError {
  using ContractError::ContractError;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Plain row-major dense matrix of doubles. Used for everything outside the
/// gradient tape: graph adjacencies, eigendecompositions, evaluation.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), d_(rows * cols, fill) {}
  Mat(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), d_(std::move(data)) {
    if (d_.size() != rows_ * cols_) throw ShapeError("Mat: data size does not match rows*cols");
  }

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return d_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * cols_ + j]; }
  double* data() { return d_.data(); }
  const double* data() const { return d_.data(); }
  std::vector<double>& vec() { return d_; }
  const std::vector<double>& vec() const { return d_; }

  Mat transposed() const {
    Mat t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool operator==(const Mat& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && d_ == o.d_; }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> d_;
};

/// C = A * B. Cache-blocked i-k-j kernel; the reduction over k runs in strictly
/// ascending order for every output element, so results are reproducible
/// independent of block sizes.
void gemm(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
          double* c);

/// C += A * B^T where A is m x k and B is n x k.
void gemm_nt_acc(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
                 double* c);

/// C += A^T * B where A is k x m and B is k x n.
void gemm_tn_acc(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
                 double* c);

Mat matmul(const Mat& a, const Mat& b);

double max_abs_diff(const Mat& a, const Mat& b);
double max_abs(const Mat& a);

}  // namespace lac
