#include "lac/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "lac/tensor.hpp"

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
  double uniform01() { return (next() >> 11) * 0x1.0p-53; }
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % bound;
  }
};

Mat gather_rows(const Mat& z, const std::vector<std::size_t>& idx) {
  Mat out(idx.size(), z.cols());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < z.cols(); ++j) out(i, j) = z(idx[i], j);
  return out;
}

double sq_dist(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double t = a[j] - b[j];
    s += t * t;
  }
  return s;
}

}  // namespace

ClassificationResult evaluate_classification(const Mat& z, const std::vector<int>& labels,
                                             const Split& split, std::size_t repeats,
                                             const ClassifierSettings& settings) {
  if (labels.size() != z.rows()) throw ContractError("evaluate_classification: missing labels");
  std::set<int> train_classes;
  int max_label = 0;
  for (std::size_t i : split.train) {
    train_classes.insert(labels[i]);
    max_label = std::max(max_label, labels[i]);
  }
  for (int y : labels) max_label = std::max(max_label, y);
  if (train_classes.size() < 2)
    throw ContractError("evaluate_classification: train split touches a single class");
  const std::size_t c = static_cast<std::size_t>(max_label) + 1;
  const std::size_t e = z.cols();

  Mat ztr = gather_rows(z, split.train);
  Mat zte = gather_rows(z, split.test);
  std::vector<int> ytr, yte;
  for (std::size_t i : split.train) ytr.push_back(labels[i]);
  for (std::size_t i : split.test) yte.push_back(labels[i]);

  ClassificationResult res;
  for (std::size_t run = 0; run < repeats; ++run) {
    Tensor w = xavier_init({e, c}, 0xC1A55 + run * 7919);
    Tensor b = Tensor::zeros({c}, true);
    std::vector<Tensor> params{w, b};
    AdamState opt(settings.lr);
    opt.weight_decay = settings.weight_decay;
    Tensor xtr = Tensor::from_mat(ztr);
    for (std::size_t epoch = 0; epoch < settings.epochs; ++epoch) {
      Tensor loss = cross_entropy(add_rowvec(matmul(xtr, w), b), ytr);
      backward(loss);
      adam_step(params, opt);
    }
    Mat logits = matmul(zte, w.to_mat());
    std::size_t correct = 0;
    for (std::size_t i = 0; i < zte.rows(); ++i) {
      std::size_t best = 0;
      double bestv = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < c; ++j) {
        const double v = logits(i, j) + b.at(j);
        if (v > bestv) {
          bestv = v;
          best = j;
        }
      }
      if (static_cast<int>(best) == yte[i]) ++correct;
    }
    res.per_run.push_back(static_cast<double>(correct) / static_cast<double>(zte.rows()));
  }
  double s = 0.0;
  for (double a : res.per_run) s += a;
  res.mean = s / res.per_run.size();
  double var = 0.0;
  for (double a : res.per_run) var += (a - res.mean) * (a - res.mean);
  res.stddev = res.per_run.size() > 1 ? std::sqrt(var / (res.per_run.size() - 1)) : 0.0;
  return res;
}

std::vector<int> kmeans(const Mat& points, std::size_t k, std::size_t restarts,
                        std::uint64_t seed) {
  const std::size_t n = points.rows(), d = points.cols();
  if (k < 2) throw ContractError("kmeans: k must be at least 2");
  if (k > n) throw ContractError("kmeans: k exceeds point count");

  std::vector<int> best_assign(n, 0);
  double best_inertia = std::numeric_limits<double>::infinity();
  Rng64 rng(seed);

  for (std::size_t r = 0; r < restarts; ++r) {
    // k-means++ seeding
    Mat centers(k, d);
    std::vector<double> mind(n, std::numeric_limits<double>::infinity());
    std::size_t first = rng.below(n);
    for (std::size_t j = 0; j < d; ++j) centers(0, j) = points(first, j);
    for (std::size_t c = 1; c < k; ++c) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        mind[i] = std::min(mind[i], sq_dist(points.data() + i * d, centers.data() + (c - 1) * d, d));
        total += mind[i];
      }
      std::size_t pick = n - 1;
      if (total > 0.0) {
        double target = rng.uniform01() * total, acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          acc += mind[i];
          if (acc >= target) {
            pick = i;
            break;
          }
        }
      } else {
        pick = rng.below(n);
      }
      for (std::size_t j = 0; j < d; ++j) centers(c, j) = points(pick, j);
    }

    std::vector<int> assign(n, -1);
    for (std::size_t iter = 0; iter < 300; ++iter) {
      bool changed = false;
      for (std::size_t i = 0; i < n; ++i) {
        int best = 0;
        double bestd = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
          const double dist = sq_dist(points.data() + i * d, centers.data() + c * d, d);
          if (dist < bestd) {
            bestd = dist;
            best = static_cast<int>(c);
          }
        }
        if (assign[i] != best) {
          assign[i] = best;
          changed = true;
        }
      }
      if (!changed) break;
      Mat sums(k, d);
      std::vector<std::size_t> counts(k, 0);
      for (std::size_t i = 0; i < n; ++i) {
        ++counts[assign[i]];
        for (std::size_t j = 0; j < d; ++j) sums(assign[i], j) += points(i, j);
      }
      for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] == 0) continue;  // empty cluster keeps its center
        for (std::size_t j = 0; j < d; ++j) centers(c, j) = sums(c, j) / counts[c];
      }
    }

    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      inertia += sq_dist(points.data() + i * d, centers.data() + assign[i] * d, d);
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best_assign = assign;
    }
  }
  return best_assign;
}

namespace {

std::map<std::pair<int, int>, std::size_t> contingency(const std::vector<int>& a,
                                                       const std::vector<int>& b) {
  std::map<std::pair<int, int>, std::size_t> table;
  for (std::size_t i = 0; i < a.size(); ++i) ++table[{a[i], b[i]}];
  return table;
}

std::map<int, std::size_t> marginal(const std::vector<int>& a) {
  std::map<int, std::size_t> m;
  for (int v : a) ++m[v];
  return m;
}

double entropy(const std::map<int, std::size_t>& m, double n) {
  double h = 0.0;
  for (auto& [_, cnt] : m) {
    const double p = cnt / n;
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace

double normalized_mutual_information(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size() || a.empty())
    throw ContractError("normalized_mutual_information: label vectors must match");
  const double n = static_cast<double>(a.size());
  auto ma = marginal(a), mb = marginal(b);
  double mi = 0.0;
  for (auto& [key, cnt] : contingency(a, b)) {
    const double pij = cnt / n;
    const double pi = ma[key.first] / n;
    const double pj = mb[key.second] / n;
    mi += pij * std::log(pij / (pi * pj));
  }
  const double denom = 0.5 * (entropy(ma, n) + entropy(mb, n));
  return denom > 0.0 ? mi / denom : 0.0;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size() || a.empty())
    throw ContractError("adjusted_rand_index: label vectors must match");
  auto comb2 = [](double x) { return x * (x - 1.0) / 2.0; };
  double sum_ij = 0.0;
  for (auto& [_, cnt] : contingency(a, b)) sum_ij += comb2(static_cast<double>(cnt));
  double sum_a = 0.0, sum_b = 0.0;
  for (auto& [_, cnt] : marginal(a)) sum_a += comb2(static_cast<double>(cnt));
  for (auto& [_, cnt] : marginal(b)) sum_b += comb2(static_cast<double>(cnt));
  const double total = comb2(static_cast<double>(a.size()));
  const double expected = sum_a * sum_b / total;
  const double maxidx = 0.5 * (sum_a + sum_b);
  if (maxidx == expected) return 0.0;
  return (sum_ij - expected) / (maxidx - expected);
}

ClusteringResult evaluate_clustering(const Mat& z, const std::vector<int>& labels, std::size_t k,
                                     std::size_t restarts, std::uint64_t seed) {
  if (labels.size() != z.rows()) throw ContractError("evaluate_clustering: missing labels");
  // L2-normalize rows; zero rows stay zero.
  Mat pts = z;
  for (std::size_t i = 0; i < pts.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < pts.cols(); ++j) s += pts(i, j) * pts(i, j);
    if (s > 0.0) {
      const double inv = 1.0 / std::sqrt(s);
      for (std::size_t j = 0; j < pts.cols(); ++j) pts(i, j) *= inv;
    }
  }
  std::vector<int> assign = kmeans(pts, k, restarts, seed);
  return {normalized_mutual_information(assign, labels), adjusted_rand_index(assign, labels)};
}

}  // namespace lac
