#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lac/linalg.hpp"

namespace lac {

namespace detail {

struct Node {
  std::vector<std::size_t> shape;
  std::vector<double> data;
  std::vector<double> grad;  // allocated only when requires_grad
  bool requires_grad = false;
  bool consumed = false;  // a backward pass already ran through this node
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward_fn;  // scatters this->grad into parents

  std::size_t numel() const { return data.size(); }
  void ensure_grad() {
    if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
  }
};

}  // namespace detail

/// Dense float64 tensor participating in a define-by-run gradient tape.
/// Value-semantic handle: copies share the underlying node.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::vector<std::size_t> shape, std::vector<double> data, bool requires_grad = false);

  static Tensor zeros(std::vector<std::size_t> shape, bool requires_grad = false);
  static Tensor full(std::vector<std::size_t> shape, double value, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);
  static Tensor from_mat(const Mat& m, bool requires_grad = false);

  bool defined() const { return static_cast<bool>(n_); }
  const std::vector<std::size_t>& shape() const { return n_->shape; }
  std::size_t ndim() const { return n_->shape.size(); }
  std::size_t numel() const { return n_->data.size(); }
  std::size_t dim(std::size_t i) const { return n_->shape[i]; }
  bool requires_grad() const { return n_->requires_grad; }

  const std::vector<double>& data() const { return n_->data; }
  std::vector<double>& mutable_data() { return n_->data; }
  const std::vector<double>& grad() const { return n_->grad; }
  bool has_grad() const { return !n_->grad.empty(); }
  void zero_grad() { if (n_->requires_grad) n_->grad.assign(n_->data.size(), 0.0); }

  double item() const;
  double at(std::size_t i) const { return n_->data[i]; }
  double at(std::size_t i, std::size_t j) const { return n_->data[i * n_->shape[1] + j]; }

  Mat to_mat() const;
  Tensor detach() const;  // same values, off the tape

  std::shared_ptr<detail::Node> node() const { return n_; }
  explicit Tensor(std::shared_ptr<detail::Node> n) : n_(std::move(n)) {}

 private:
  std::shared_ptr<detail::Node> n_;
};

/// Scoped suppression of tape recording (forward-only evaluation).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;

 private:
  bool prev_;
};

bool grad_enabled();

// ---- differentiable operations ------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);  // elementwise, same shape
Tensor scale(const Tensor& a, double s);
Tensor add_rowvec(const Tensor& a, const Tensor& v);  // a: m x n, v: length n
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
Tensor tanh_t(const Tensor& a);
Tensor gelu(const Tensor& a);
Tensor prelu(const Tensor& x, const Tensor& slope);  // slope: scalar tensor
Tensor col_scale(const Tensor& a, const Tensor& v);  // out_ij = a_ij * v_j
Tensor softmax_rows(const Tensor& a);
Tensor layer_norm_rows(const Tensor& x, const Tensor& gain, const Tensor& bias,
                       double eps = 1e-6);
Tensor logsumexp_rows(const Tensor& a);  // m x n -> length m
Tensor diag_part(const Tensor& a);       // n x n -> length n
Tensor row_l2_normalize(const Tensor& a);
/// P_ij = (a_ij + I_ij) / sqrt(d_i d_j) with d_i = sum_j |a_ij| + 1.
Tensor normalize_adj(const Tensor& a);
Tensor slice_cols(const Tensor& a, std::size_t j0, std::size_t j1);
Tensor reshape(const Tensor& a, std::vector<std::size_t> shape);
/// Mean negative log-likelihood of softmax(logits) at the given labels.
Tensor cross_entropy(const Tensor& logits, const std::vector<int>& labels);

/// Runs reverse-mode accumulation from a scalar loss. Each requires_grad leaf
/// reachable from the loss receives d(loss)/d(leaf) in its grad buffer. The
/// tape is consumed: a second backward through any visited node throws.
void backward(const Tensor& loss);

// ---- initialization and optimization -------------------------------------

/// Uniform Xavier/Glorot init on [-a, a], a = sqrt(6 / (fan_in + fan_out)).
/// Deterministic for a fixed seed.
Tensor xavier_init(const std::vector<std::size_t>& shape, std::uint64_t seed,
                   bool requires_grad = true);

struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
  std::uint64_t step = 0;
  std::vector<std::vector<double>> m, v;

  explicit AdamState(double lr_ = 1e-3) : lr(lr_) {}
};

/// One Adam update with bias correction over all params; grads are cleared.
void adam_step(std::vector<Tensor>& params, AdamState& state);

}  // namespace lac
