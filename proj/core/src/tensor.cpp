#include "lac/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace lac {

namespace {

thread_local bool g_grad_enabled = true;

std::size_t shape_numel(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (auto s : shape) n *= s;
  return n;
}

std::string shape_str(const std::vector<std::size_t>& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "x" : "") + std::to_string(s[i]);
  return out + "]";
}

using NodePtr = std::shared_ptr<detail::Node>;

NodePtr make_node(std::vector<std::size_t> shape, std::vector<double> data) {
  auto n = std::make_shared<detail::Node>();
  n->shape = std::move(shape);
  n->data = std::move(data);
  return n;
}

/// Attaches parents and a backward function when the tape is recording.
Tensor finish(NodePtr out, std::vector<NodePtr> parents,
              std::function<void(detail::Node&)> backward_fn) {
  bool track = false;
  if (g_grad_enabled)
    for (const auto& p : parents)
      if (p->requires_grad) track = true;
  if (track) {
    out->requires_grad = true;
    out->parents = std::move(parents);
    out->backward_fn = std::move(backward_fn);
  }
  return Tensor(std::move(out));
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape())
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                     shape_str(b.shape()));
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data, bool requires_grad) {
  if (shape_numel(shape) != data.size())
    throw ShapeError("Tensor: data length " + std::to_string(data.size()) +
                     " does not match shape " + shape_str(shape));
  n_ = make_node(std::move(shape), std::move(data));
  if (requires_grad) {
    n_->requires_grad = true;
    n_->ensure_grad();
  }
}

Tensor Tensor::zeros(std::vector<std::size_t> shape, bool requires_grad) {
  std::size_t n = shape_numel(shape);
  return Tensor(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
}

Tensor Tensor::full(std::vector<std::size_t> shape, double value, bool requires_grad) {
  std::size_t n = shape_numel(shape);
  return Tensor(std::move(shape), std::vector<double>(n, value), requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return Tensor({1}, {value}, requires_grad);
}

Tensor Tensor::from_mat(const Mat& m, bool requires_grad) {
  return Tensor({m.rows(), m.cols()}, m.vec(), requires_grad);
}

double Tensor::item() const {
  if (numel() != 1) throw ContractError("item: tensor is not scalar, shape " + shape_str(shape()));
  return n_->data[0];
}

Mat Tensor::to_mat() const {
  if (ndim() == 1) return Mat(1, dim(0), n_->data);
  if (ndim() != 2) throw ShapeError("to_mat: tensor is not 2-d");
  return Mat(dim(0), dim(1), n_->data);
}

Tensor Tensor::detach() const { return Tensor(n_->shape, n_->data, false); }

NoGradGuard::NoGradGuard() : prev_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = prev_; }

bool grad_enabled() { return g_grad_enabled; }

// ---- ops -------------------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.ndim() != 2 || b.ndim() != 2) throw ShapeError("matmul: operands must be 2-d");
  if (a.dim(1) != b.dim(0))
    throw ShapeError("matmul: inner dimensions disagree: " + shape_str(a.shape()) + " vs " +
                     shape_str(b.shape()));
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  auto out = make_node({m, n}, std::vector<double>(m * n));
  gemm(m, k, n, a.data().data(), b.data().data(), out->data.data());
  auto an = a.node(), bn = b.node();
  return finish(out, {an, bn}, [an, bn, m, k, n](detail::Node& o) {
    if (an->requires_grad) {
      an->ensure_grad();
      gemm_nt_acc(m, n, k, o.grad.data(), bn->data.data(), an->grad.data());
    }
    if (bn->requires_grad) {
      bn->ensure_grad();
      gemm_tn_acc(k, m, n, an->data.data(), o.grad.data(), bn->grad.data());
    }
  });
}

Tensor transpose(const Tensor& a) {
  if (a.ndim() != 2) throw ShapeError("transpose: operand must be 2-d");
  const std::size_t m = a.dim(0), n = a.dim(1);
  std::vector<double> d(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) d[j * m + i] = a.data()[i * n + j];
  auto out = make_node({n, m}, std::move(d));
  auto an = a.node();
  return finish(out, {an}, [an, m, n](detail::Node& o) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) an->grad[i * n + j] += o.grad[j * m + i];
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "add");
  std::vector<double> d(a.numel());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.data()[i] + b.data()[i];
  auto out = make_node(a.shape(), std::move(d));
  auto an = a.node(), bn = b.node();
  return finish(out, {an, bn}, [an, bn](detail::Node& o) {
    if (an->requires_grad) {
      an->ensure_grad();
      for (std::size_t i = 0; i < o.grad.size(); ++i) an->grad[i] += o.grad[i];
    }
    if (bn->requires_grad) {
      bn->ensure_grad();
      for (std::size_t i = 0; i < o.grad.size(); ++i) bn->grad[i] += o.grad[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "sub");
  std::vector<double> d(a.numel());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.data()[i] - b.data()[i];
  auto out = make_node(a.shape(), std::move(d));
  auto an = a.node(), bn = b.node();
  return finish(out, {an, bn}, [an, bn](detail::Node& o) {
    if (an->requires_grad) {
      an->ensure_grad();
      for (std::size_t i = 0; i < o.grad.size(); ++i) an->grad[i] += o.grad[i];
    }
    if (bn->requires_grad) {
      bn->ensure_grad();
      for (std::size_t i = 0; i < o.grad.size(); ++i) bn->grad[i] -= o.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "mul");
  std::vector<double> d(a.numel());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.data()[i] * b.data()[i];
  auto out = make_node(a.shape(), std::move(d));
  auto an = a.node(), bn = b.node();
  return finish(out, {an, bn}, [an, bn](detail::Node& o) {
    if (an->requires_grad) {
      an->ensure_grad();
      for (std::size_t i = 0; i < o.grad.size(); ++i) an->grad[i] += o.grad[i] * bn->data[i];
    }
    if (bn->requires_grad) {
      bn->ensure_grad();
      for (std::size_t i = 0; i < o.grad.size(); ++i) bn->grad[i] += o.grad[i] * an->data[i];
    }
  });
}

Tensor scale(const Tensor& a, double s) {
  std::vector<double> d(a.numel());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.data()[i] * s;
  auto out = make_node(a.shape(), std::move(d));
  auto an = a.node();
  return finish(out, {an}, [an, s](detail::Node& o) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (std::size_t i = 0; i < o.grad.size(); ++i) an->grad[i] += o.grad[i] * s;
  });
}

Tensor add_rowvec(const Tensor& a, const Tensor& v) {
  if (a.ndim() != 2 || v.ndim() != 1 || a.dim(1) != v.dim(0))
    throw ShapeError("add_rowvec: shapes " + shape_str(a.shape()) + " and " +
                     shape_str(v.shape()) + " are incompatible");
  const std::size_t m = a.dim(0), n = a.dim(1);
  std::vector<double> d(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) d[i * n + j] = a.data()[i * n + j] + v.data()[j];
  auto out = make_node({m, n}, std::move(d));
  auto an = a.node(), vn = v.node();
  return finish(out, {an, vn}, [an, vn, m, n](detail::Node& o) {
    if (an->requires_grad) {
      an->ensure_grad();
      for (std::size_t i = 0; i < o.grad.size(); ++i) an->grad[i] += o.grad[i];
    }
    if (vn->requires_grad) {
      vn->ensure_grad();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) vn->grad[j] += o.grad[i * n + j];
    }
  });
}

Tensor sum(const Tensor& a) {
  double acc = 0.0;
  for (double v : a.data()) acc += v;
  auto out = make_node({1}, {acc});
  auto an = a.node();
  return finish(out, {an}, [an](detail::Node& o) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (double& g : an->grad) g += o.grad[0];
  });
}

Tensor mean(const Tensor& a) { return scale(sum(a), 1.0 / static_cast<double>(a.numel())); }

Tensor tanh_t(const Tensor& a) {
  std::vector<double> d(a.numel());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::tanh(a.data()[i]);
  auto out = make_node(a.shape(), std::move(d));
  auto an = a.node();
  return finish(out, {an}, [an](detail::Node& o) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (std::size_t i = 0; i < o.grad.size(); ++i)
      an->grad[i] += o.grad[i] * (1.0 - o.data[i] * o.data[i]);
  });
}

Tensor gelu(const Tensor& a) {
  std::vector<double> d(a.numel());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double x = a.data()[i];
    d[i] = 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0)));
  }
  auto out = make_node(a.shape(), std::move(d));
  auto an = a.node();
  return finish(out, {an}, [an](detail::Node& o) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    constexpr double inv_sqrt2 = 0.7071067811865475;
    constexpr double inv_sqrt2pi = 0.3989422804014327;
    for (std::size_t i = 0; i < o.grad.size(); ++i) {
      const double x = an->data[i];
      const double cdf = 0.5 * (1.0 + std::erf(x * inv_sqrt2));
      const double pdf = inv_sqrt2pi * std::exp(-0.5 * x * x);
      an->grad[i] += o.grad[i] * (cdf + x * pdf);
    }
  });
}

Tensor prelu(const Tensor& x, const Tensor& slope) {
  if (slope.numel() != 1) throw ShapeError("prelu: slope must be a scalar tensor");
  const double s = slope.at(0);
  std::vector<double> d(x.numel());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double v = x.data()[i];
    d[i] = v >= 0.0 ? v : s * v;
  }
  auto out = make_node(x.shape(), std::move(d));
  auto xn = x.node(), sn = slope.node();
  return finish(out, {xn, sn}, [xn, sn, s](detail::Node& o) {
    if (xn->requires_grad) {
      xn->ensure_grad();
      for (std::size_t i = 0; i < o.grad.size(); ++i)
        xn->grad[i] += o.grad[i] * (xn->data[i] >= 0.0 ? 1.0 : s);
    }
    if (sn->requires_grad) {
      sn->ensure_grad();
      double acc = 0.0;
      for (std::size_t i = 0; i < o.grad.size(); ++i)
        if (xn->data[i] < 0.0) acc += o.grad[i] * xn->data[i];
      sn->grad[0] += acc;
    }
  });
}

Tensor col_scale(const Tensor& a, const Tensor& v) {
  if (a.ndim() != 2 || v.ndim() != 1 || a.dim(1) != v.dim(0))
    throw ShapeError("col_scale: shapes " + shape_str(a.shape()) + " and " +
                     shape_str(v.shape()) + " are incompatible");
  const std::size_t m = a.dim(0), n = a.dim(1);
  std::vector<double> d(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) d[i * n + j] = a.data()[i * n + j] * v.data()[j];
  auto out = make_node({m, n}, std::move(d));
  auto an = a.node(), vn = v.node();
  return finish(out, {an, vn}, [an, vn, m, n](detail::Node& o) {
    if (an->requires_grad) {
      an->ensure_grad();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) an->grad[i * n + j] += o.grad[i * n + j] * vn->data[j];
    }
    if (vn->requires_grad) {
      vn->ensure_grad();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) vn->grad[j] += o.grad[i * n + j] * an->data[i * n + j];
    }
  });
}

Tensor softmax_rows(const Tensor& a) {
  if (a.ndim() != 2) throw ShapeError("softmax_rows: operand must be 2-d");
  const std::size_t m = a.dim(0), n = a.dim(1);
  std::vector<double> d(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = a.data().data() + i * n;
    double mx = row[0];
    for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, row[j]);
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      d[i * n + j] = std::exp(row[j] - mx);
      z += d[i * n + j];
    }
    for (std::size_t j = 0; j < n; ++j) d[i * n + j] /= z;
  }
  auto out = make_node({m, n}, std::move(d));
  auto an = a.node();
  return finish(out, {an, }, [an, m, n](detail::Node& o) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (std::size_t i = 0; i < m; ++i) {
      const double* y = o.data.data() + i * n;
      const double* dy = o.grad.data() + i * n;
      double dot = 0.0;
      for (std::size_t j = 0; j < n; ++j) dot += y[j] * dy[j];
      double* dx = an->grad.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) dx[j] += y[j] * (dy[j] - dot);
    }
  });
}

Tensor layer_norm_rows(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
  if (x.ndim() != 2) throw ShapeError("layer_norm_rows: input must be 2-d");
  const std::size_t m = x.dim(0), n = x.dim(1);
  if (gain.numel() != n || bias.numel() != n)
    throw ShapeError("layer_norm_rows: gain/bias length must equal row width");
  std::vector<double> d(m * n);
  std::vector<double> inv_std(m), mu(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = x.data().data() + i * n;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += row[j];
    mu[i] = s / n;
    double var = 0.0;
    for (std::size_t j = 0; j < n; ++j) var += (row[j] - mu[i]) * (row[j] - mu[i]);
    var /= n;
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < n; ++j)
      d[i * n + j] = (row[j] - mu[i]) * inv_std[i] * gain.data()[j] + bias.data()[j];
  }
  auto out = make_node({m, n}, std::move(d));
  auto xn = x.node(), gn = gain.node(), bn = bias.node();
  return finish(out, {xn, gn, bn},
                [xn, gn, bn, m, n, mu = std::move(mu), inv_std = std::move(inv_std)](detail::Node& o) {
    for (std::size_t i = 0; i < m; ++i) {
      const double* row = xn->data.data() + i * n;
      const double* dy = o.grad.data() + i * n;
      if (gn->requires_grad) {
        gn->ensure_grad();
        for (std::size_t j = 0; j < n; ++j)
          gn->grad[j] += dy[j] * (row[j] - mu[i]) * inv_std[i];
      }
      if (bn->requires_grad) {
        bn->ensure_grad();
        for (std::size_t j = 0; j < n; ++j) bn->grad[j] += dy[j];
      }
      if (xn->requires_grad) {
        xn->ensure_grad();
        // dx = (g/std) * (dy - mean(g*dy') - xhat * mean(g*dy'*xhat)), expanded per row
        double sum_gdy = 0.0, sum_gdy_xhat = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          const double xhat = (row[j] - mu[i]) * inv_std[i];
          const double gdy = dy[j] * gn->data[j];
          sum_gdy += gdy;
          sum_gdy_xhat += gdy * xhat;
        }
        double* dx = xn->grad.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) {
          const double xhat = (row[j] - mu[i]) * inv_std[i];
          const double gdy = dy[j] * gn->data[j];
          dx[j] += inv_std[i] * (gdy - sum_gdy / n - xhat * sum_gdy_xhat / n);
        }
      }
    }
  });
}

Tensor logsumexp_rows(const Tensor& a) {
  if (a.ndim() != 2) throw ShapeError("logsumexp_rows: operand must be 2-d");
  const std::size_t m = a.dim(0), n = a.dim(1);
  std::vector<double> d(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = a.data().data() + i * n;
    double mx = row[0];
    for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, row[j]);
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) z += std::exp(row[j] - mx);
    d[i] = mx + std::log(z);
  }
  auto out = make_node({m}, std::move(d));
  auto an = a.node();
  return finish(out, {an}, [an, m, n](detail::Node& o) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (std::size_t i = 0; i < m; ++i) {
      const double* row = an->data.data() + i * n;
      double* dx = an->grad.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) dx[j] += o.grad[i] * std::exp(row[j] - o.data[i]);
    }
  });
}

Tensor diag_part(const Tensor& a) {
  if (a.ndim() != 2 || a.dim(0) != a.dim(1)) throw ShapeError("diag_part: operand must be square");
  const std::size_t n = a.dim(0);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a.data()[i * n + i];
  auto out = make_node({n}, std::move(d));
  auto an = a.node();
  return finish(out, {an}, [an, n](detail::Node& o) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (std::size_t i = 0; i < n; ++i) an->grad[i * n + i] += o.grad[i];
  });
}

Tensor row_l2_normalize(const Tensor& a) {
  if (a.ndim() != 2) throw ShapeError("row_l2_normalize: operand must be 2-d");
  const std::size_t m = a.dim(0), n = a.dim(1);
  std::vector<double> d(m * n), norms(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = a.data().data() + i * n;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += row[j] * row[j];
    norms[i] = std::sqrt(s);
    if (norms[i] == 0.0)
      throw ContractError("row_l2_normalize: zero-norm row " + std::to_string(i));
    for (std::size_t j = 0; j < n; ++j) d[i * n + j] = row[j] / norms[i];
  }
  auto out = make_node({m, n}, std::move(d));
  auto an = a.node();
  return finish(out, {an}, [an, m, n, norms = std::move(norms)](detail::Node& o) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (std::size_t i = 0; i < m; ++i) {
      const double* y = o.data.data() + i * n;
      const double* dy = o.grad.data() + i * n;
      double dot = 0.0;
      for (std::size_t j = 0; j < n; ++j) dot += y[j] * dy[j];
      double* dx = an->grad.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) dx[j] += (dy[j] - y[j] * dot) / norms[i];
    }
  });
}

Tensor normalize_adj(const Tensor& a) {
  if (a.ndim() != 2 || a.dim(0) != a.dim(1)) throw ShapeError("normalize_adj: operand must be square");
  const std::size_t n = a.dim(0);
  std::vector<double> deg(n), dinv(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 1.0;  // self-loop
    const double* row = a.data().data() + i * n;
    for (std::size_t j = 0; j < n; ++j) s += std::fabs(row[j]);
    deg[i] = s;
    dinv[i] = 1.0 / std::sqrt(s);
  }
  std::vector<double> d(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double aij = a.data()[i * n + j] + (i == j ? 1.0 : 0.0);
      d[i * n + j] = aij * dinv[i] * dinv[j];
    }
  auto out = make_node({n, n}, std::move(d));
  auto an = a.node();
  return finish(out, {an}, [an, n, deg = std::move(deg), dinv = std::move(dinv)](detail::Node& o) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    // dL/ddeg_i = -(1/2 deg_i) * (sum_j dP_ij P_ij + sum_j dP_ji P_ji)
    std::vector<double> gd(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double t = o.grad[i * n + j] * o.data[i * n + j];
        gd[i] += t;
        gd[j] += t;
      }
    for (std::size_t i = 0; i < n; ++i) gd[i] *= -0.5 / deg[i];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double g = o.grad[i * n + j] * dinv[i] * dinv[j];
        const double aij = an->data[i * n + j];
        if (aij > 0.0)
          g += gd[i];
        else if (aij < 0.0)
          g -= gd[i];
        an->grad[i * n + j] += g;
      }
  });
}

Tensor slice_cols(const Tensor& a, std::size_t j0, std::size_t j1) {
  if (a.ndim() != 2 || j0 >= j1 || j1 > a.dim(1)) throw ShapeError("slice_cols: bad column range");
  const std::size_t m = a.dim(0), n = a.dim(1), w = j1 - j0;
  std::vector<double> d(m * w);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < w; ++j) d[i * w + j] = a.data()[i * n + j0 + j];
  auto out = make_node({m, w}, std::move(d));
  auto an = a.node();
  return finish(out, {an}, [an, m, n, w, j0](detail::Node& o) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < w; ++j) an->grad[i * n + j0 + j] += o.grad[i * w + j];
  });
}

Tensor reshape(const Tensor& a, std::vector<std::size_t> shape) {
  if (shape_numel(shape) != a.numel())
    throw ShapeError("reshape: element count mismatch for " + shape_str(shape));
  auto out = make_node(std::move(shape), a.data());
  auto an = a.node();
  return finish(out, {an}, [an](detail::Node& o) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (std::size_t i = 0; i < o.grad.size(); ++i) an->grad[i] += o.grad[i];
  });
}

Tensor cross_entropy(const Tensor& logits, const std::vector<int>& labels) {
  if (logits.ndim() != 2) throw ShapeError("cross_entropy: logits must be 2-d");
  const std::size_t m = logits.dim(0), c = logits.dim(1);
  if (labels.size() != m) throw ContractError("cross_entropy: label count mismatch");
  for (int y : labels)
    if (y < 0 || static_cast<std::size_t>(y) >= c)
      throw ContractError("cross_entropy: label out of range");
  std::vector<double> lse(m);
  double loss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = logits.data().data() + i * c;
    double mx = row[0];
    for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, row[j]);
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) z += std::exp(row[j] - mx);
    lse[i] = mx + std::log(z);
    loss += lse[i] - row[labels[i]];
  }
  loss /= m;
  auto out = make_node({1}, {loss});
  auto ln = logits.node();
  return finish(out, {ln}, [ln, m, c, labels, lse = std::move(lse)](detail::Node& o) {
    if (!ln->requires_grad) return;
    ln->ensure_grad();
    const double g = o.grad[0] / m;
    for (std::size_t i = 0; i < m; ++i) {
      const double* row = ln->data.data() + i * c;
      double* dx = ln->grad.data() + i * c;
      for (std::size_t j = 0; j < c; ++j) dx[j] += g * std::exp(row[j] - lse[i]);
      dx[labels[i]] -= g;
    }
  });
}

// ---- backward ---------------------------------------------------------------

void backward(const Tensor& loss) {
  if (loss.numel() != 1)
    throw ContractError("backward: loss must be scalar, got shape with " +
                        std::to_string(loss.numel()) + " elements");
  auto root = loss.node();
  if (!root->requires_grad)
    throw ContractError("backward: loss does not depend on any requires_grad tensor");

  // Iterative post-order topological sort over the tape.
  std::vector<detail::Node*> topo;
  std::unordered_set<detail::Node*> visited;
  std::vector<std::pair<detail::Node*, std::size_t>> stack{{root.get(), 0}};
  visited.insert(root.get());
  while (!stack.empty()) {
    auto& [node, idx] = stack.back();
    if (idx < node->parents.size()) {
      detail::Node* p = node->parents[idx++].get();
      if (p->requires_grad && !visited.count(p)) {
        visited.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      topo.push_back(node);
      stack.pop_back();
    }
  }

  for (detail::Node* n : topo)
    if (n->consumed) throw ContractError("backward: tape already consumed");

  root->ensure_grad();
  root->grad[0] += 1.0;
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    detail::Node* n = *it;
    if (!n->parents.empty()) n->consumed = true;
    if (n->backward_fn) {
      n->ensure_grad();
      n->backward_fn(*n);
    }
  }
}

// ---- init / optimizer ---------------------------------------------------------

namespace {
// splitmix64; portable across standard library implementations.
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
  double uniform01() { return (next() >> 11) * 0x1.0p-53; }
};
}  // namespace

Tensor xavier_init(const std::vector<std::size_t>& shape, std::uint64_t seed, bool requires_grad) {
  if (shape.empty()) throw ContractError("xavier_init: shape must have at least one dimension");
  const double fan_in = static_cast<double>(shape[0]);
  const double fan_out = static_cast<double>(shape.size() > 1 ? shape[1] : shape[0]);
  const double a = std::sqrt(6.0 / (fan_in + fan_out));
  Rng64 rng(seed);
  std::vector<double> d(shape_numel(shape));
  for (double& v : d) v = (2.0 * rng.uniform01() - 1.0) * a;
  return Tensor(shape, std::move(d), requires_grad);
}

void adam_step(std::vector<Tensor>& params, AdamState& state) {
  if (state.m.empty()) {
    for (auto& p : params) {
      state.m.emplace_back(p.numel(), 0.0);
      state.v.emplace_back(p.numel(), 0.0);
    }
  }
  if (state.m.size() != params.size())
    throw ContractError("adam_step: state does not match parameter list");
  for (std::size_t k = 0; k < params.size(); ++k)
    if (!params[k].has_grad())
      throw ContractError("adam_step: parameter " + std::to_string(k) + " has no gradient");

  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& data = params[k].mutable_data();
    const auto& grad = params[k].grad();
    auto& m = state.m[k];
    auto& v = state.v[k];
    for (std::size_t i = 0; i < data.size(); ++i) {
      double g = grad[i] + state.weight_decay * data[i];
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g;
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g * g;
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      data[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
    params[k].zero_grad();
  }
}

}  // namespace lac
