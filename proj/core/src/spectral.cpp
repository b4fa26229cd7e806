#include "lac/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>

namespace lac {

namespace {

constexpr std::size_t kJacobiMaxN = 128;

// Cyclic Jacobi rotations with eigenvector accumulation. Robust and simple;
// used on small matrices and as the slow reference path.
void jacobi_eig(Mat& a, Mat& v, std::vector<double>& d) {
  const std::size_t n = a.rows();
  v = Mat::identity(n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-26) break;
    if (sweep == 99) throw NumericError("eig_sym: Jacobi sweep cap reached");
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }
  d.resize(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i);
}

// Householder reduction to tridiagonal form with accumulated transforms
// (EISPACK tred2 lineage).
void tred2(Mat& z, std::vector<double>& d, std::vector<double>& e) {
  const int n = static_cast<int>(z.rows());
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  for (int i = n - 1; i > 0; --i) {
    const int l = i - 1;
    double h = 0.0, scl = 0.0;
    if (l > 0) {
      for (int k = 0; k <= l; ++k) scl += std::fabs(z(i, k));
      if (scl == 0.0) {
        e[i] = z(i, l);
      } else {
        for (int k = 0; k <= l; ++k) {
          z(i, k) /= scl;
          h += z(i, k) * z(i, k);
        }
        double f = z(i, l);
        double g = (f >= 0.0 ? -std::sqrt(h) : std::sqrt(h));
        e[i] = scl * g;
        h -= f * g;
        z(i, l) = f - g;
        f = 0.0;
        for (int j = 0; j <= l; ++j) {
          z(j, i) = z(i, j) / h;
          g = 0.0;
          for (int k = 0; k <= j; ++k) g += z(j, k) * z(i, k);
          for (int k = j + 1; k <= l; ++k) g += z(k, j) * z(i, k);
          e[j] = g / h;
          f += e[j] * z(i, j);
        }
        const double hh = f / (h + h);
        for (int j = 0; j <= l; ++j) {
          f = z(i, j);
          g = e[j] - hh * f;
          e[j] = g;
          for (int k = 0; k <= j; ++k) z(j, k) -= f * e[k] + g * z(i, k);
        }
      }
    } else {
      e[i] = z(i, l);
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  for (int i = 0; i < n; ++i) {
    if (d[i] != 0.0) {
      for (int j = 0; j < i; ++j) {
        double g = 0.0;
        for (int k = 0; k < i; ++k) g += z(i, k) * z(k, j);
        for (int k = 0; k < i; ++k) z(k, j) -= g * z(k, i);
      }
    }
    d[i] = z(i, i);
    z(i, i) = 1.0;
    for (int j = 0; j < i; ++j) z(j, i) = z(i, j) = 0.0;
  }
}

// Implicit-shift QL on the tridiagonal form, rotations applied to z
// (EISPACK tql2 lineage).
void tql2(std::vector<double>& d, std::vector<double>& e, Mat& z) {
  const int n = static_cast<int>(d.size());
  for (int i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (iter++ == 60) throw NumericError("eig_sym: QL iteration cap reached");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::fabs(r) : -std::fabs(r)));
        double s = 1.0, c = 1.0, p = 0.0;
        int i = m - 1;
        for (; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (int k = 0; k < n; ++k) {
            f = z(k, i + 1);
            z(k, i + 1) = s * z(k, i) + c * f;
            z(k, i) = c * z(k, i) - s * f;
          }
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace

std::pair<Mat, std::vector<double>> eig_sym(const Mat& s) {
  if (s.rows() != s.cols()) throw ContractError("eig_sym: matrix is not square");
  const std::size_t n = s.rows();
  double asym = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      asym = std::max(asym, std::fabs(s(i, j) - s(j, i)));
  if (asym >= 1e-10)
    throw ContractError("eig_sym: input asymmetry " + std::to_string(asym) + " exceeds 1e-10");

  Mat work = s;
  Mat vec;
  std::vector<double> val;
  if (n <= kJacobiMaxN) {
    jacobi_eig(work, vec, val);
  } else {
    std::vector<double> e;
    tred2(work, val, e);
    tql2(val, e, work);
    vec = std::move(work);
  }

  // ascending order, deterministic tie-break by original index
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });

  Mat u(n, n);
  std::vector<double> lam(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    lam[j] = val[src];
    double sign = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (vec(i, src) != 0.0) {
        sign = vec(i, src) > 0.0 ? 1.0 : -1.0;
        break;
      }
    }
    for (std::size_t i = 0; i < n; ++i) u(i, j) = sign * vec(i, src);
  }
  return {std::move(u), std::move(lam)};
}

SpectralView to_spectral_view(const Graph& g, bool raw_adjacency) {
  const Mat s = raw_adjacency ? g.adjacency : normalize_adjacency(g);
  SpectralView view;
  auto [u, lam] = eig_sym(s);
  view.u = std::move(u);
  view.lambdas = std::move(lam);
  view.c = Mat(g.n, g.features.cols());
  gemm_tn_acc(g.n, g.n, g.features.cols(), view.u.data(), g.features.data(), view.c.data());
  return view;
}

std::pair<Tensor, Tensor> reconstruct(const Mat& u, const Tensor& lambdas_aug,
                                      const Tensor& c_aug) {
  const std::size_t n = u.rows();
  if (lambdas_aug.ndim() != 1 || lambdas_aug.dim(0) != n)
    throw ContractError("reconstruct: lambda vector length must equal basis size");
  if (c_aug.ndim() != 2 || c_aug.dim(0) != n)
    throw ContractError("reconstruct: coefficient row count must equal basis size");
  Tensor uc = Tensor::from_mat(u);
  Tensor ut = Tensor::from_mat(u.transposed());
  Tensor a_aug = matmul(col_scale(uc, lambdas_aug), ut);
  Tensor x_aug = matmul(uc, c_aug);
  return {std::move(a_aug), std::move(x_aug)};
}

double edge_flip_delta(const SpectralView& view, std::size_t p, std::size_t q) {
  if (p == q) throw ContractError("edge_flip_delta: p and q must differ");
  const std::size_t n = view.u.rows();
  // First-order eigenvalue perturbation for flipping edge (p, q):
  // delta_i = u_i^T (A' - A) u_i, with the flipped normalized adjacency A'
  // built exactly (only rows/cols p and q change). Everything needed is
  // recoverable from the view: A_pp = 1/d_p gives the self-loop degrees,
  // A_pq gives the current edge weight, and (A u_i)_p = lambda_i u_pi.
  double app = 0.0, aqq = 0.0, apq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double up = view.u(p, i), uq = view.u(q, i);
    app += view.lambdas[i] * up * up;
    aqq += view.lambdas[i] * uq * uq;
    apq += view.lambdas[i] * up * uq;
  }
  const double dp = 1.0 / app, dq = 1.0 / aqq;
  const double has_edge = apq * std::sqrt(dp * dq) > 0.5 ? 1.0 : 0.0;
  const double s = has_edge > 0.5 ? -1.0 : 1.0;  // remove vs add
  const double dpn = dp + s, dqn = dq + s;
  const double gp = std::sqrt(dp / dpn), gq = std::sqrt(dq / dqn);
  const double d_pp = 1.0 / dpn - 1.0 / dp, d_qq = 1.0 / dqn - 1.0 / dq;
  const double d_pq = (has_edge + s) / std::sqrt(dpn * dqn) - apq;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double up = view.u(p, i), uq = view.u(q, i), li = view.lambdas[i];
    // row-p (and symmetric col-p) rescale, excluding the pp and pq entries
    const double row_p = (gp - 1.0) * (li * up - app * up - apq * uq);
    const double row_q = (gq - 1.0) * (li * uq - aqq * uq - apq * up);
    acc += std::fabs(2.0 * up * row_p + 2.0 * uq * row_q + d_pp * up * up + d_qq * uq * uq +
                     2.0 * d_pq * up * uq);
  }
  return acc;
}

double node_removal_delta(const SpectralView& view, const Mat& adjacency, std::size_t node) {
  double acc = 0.0;
  for (std::size_t t = 0; t < adjacency.cols(); ++t)
    if (t != node && adjacency(node, t) != 0.0) acc += edge_flip_delta(view, node, t);
  return acc;
}

namespace {
constexpr char kCacheMagic[8] = {'L', 'A', 'C', 'S', 'P', 'E', 'C', '1'};
}

void save_spectral_cache(const std::string& path, const SpectralView& view, std::uint64_t hash) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_spectral_cache: cannot open " + path);
  const std::uint64_t n = view.u.rows(), d = view.c.cols();
  f.write(kCacheMagic, 8);
  f.write(reinterpret_cast<const char*>(&hash), 8);
  f.write(reinterpret_cast<const char*>(&n), 8);
  f.write(reinterpret_cast<const char*>(&d), 8);
  f.write(reinterpret_cast<const char*>(view.u.data()), n * n * 8);
  f.write(reinterpret_cast<const char*>(view.lambdas.data()), n * 8);
  f.write(reinterpret_cast<const char*>(view.c.data()), n * d * 8);
}

bool load_spectral_cache(const std::string& path, std::uint64_t hash, SpectralView& out) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return false;
  char magic[8];
  std::uint64_t h = 0, n = 0, d = 0;
  f.read(magic, 8);
  f.read(reinterpret_cast<char*>(&h), 8);
  f.read(reinterpret_cast<char*>(&n), 8);
  f.read(reinterpret_cast<char*>(&d), 8);
  if (!f || std::memcmp(magic, kCacheMagic, 8) != 0 || h != hash) return false;
  out.u = Mat(n, n);
  out.lambdas.resize(n);
  out.c = Mat(n, d);
  f.read(reinterpret_cast<char*>(out.u.data()), n * n * 8);
  f.read(reinterpret_cast<char*>(out.lambdas.data()), n * 8);
  f.read(reinterpret_cast<char*>(out.c.data()), n * d * 8);
  return static_cast<bool>(f);
}

std::uint64_t dataset_hash(const Graph& g) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* p, std::size_t bytes) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < bytes; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
  };
  mix(g.adjacency.data(), g.adjacency.vec().size() * 8);
  mix(g.features.data(), g.features.vec().size() * 8);
  return h;
}

}  // namespace lac
