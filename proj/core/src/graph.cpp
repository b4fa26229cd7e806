#include "lac/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lac {

namespace {

// splitmix64, matching the tensor module's generator family.
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
  // unbiased bounded draw by rejection
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % bound;
  }
};

[[noreturn]] void parse_fail(const std::string& path, std::size_t line, const std::string& what) {
  throw ParseError(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

std::size_t Graph::undirected_edge_count() const {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (adjacency(i, j) != 0.0) ++c;
  return c;
}

Graph load_graph(const std::string& edge_path, const std::string& feature_path,
                 const std::optional<std::string>& label_path) {
  Graph g;

  std::ifstream ff(feature_path);
  if (!ff) throw ParseError(feature_path + ": cannot open");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0, width = 0;
  while (std::getline(ff, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t pos = 0;
        row.push_back(std::stod(cell, &pos));
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
        if (pos != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        parse_fail(feature_path, lineno, "non-numeric field '" + cell + "'");
      }
    }
    if (width == 0) width = row.size();
    if (row.size() != width)
      parse_fail(feature_path, lineno,
                 "ragged row: " + std::to_string(row.size()) + " fields, expected " +
                     std::to_string(width));
    rows.push_back(std::move(row));
  }
  g.n = rows.size();
  g.features = Mat(g.n, width);
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = 0; j < width; ++j) g.features(i, j) = rows[i][j];

  g.adjacency = Mat(g.n, g.n);
  std::ifstream ef(edge_path);
  if (!ef) throw ParseError(edge_path + ": cannot open");
  lineno = 0;
  while (std::getline(ef, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    long long u, v;
    if (!(ss >> u >> v)) parse_fail(edge_path, lineno, "expected 'u v' pair");
    std::string rest;
    if (ss >> rest) parse_fail(edge_path, lineno, "trailing field '" + rest + "'");
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= g.n || static_cast<std::size_t>(v) >= g.n)
      parse_fail(edge_path, lineno, "node id out of range [0," + std::to_string(g.n) + ")");
    if (u == v) continue;  // self-loops dropped
    g.adjacency(u, v) = 1.0;
    g.adjacency(v, u) = 1.0;
  }

  if (label_path) {
    std::ifstream lf(*label_path);
    if (!lf) throw ParseError(*label_path + ": cannot open");
    lineno = 0;
    while (std::getline(lf, line)) {
      ++lineno;
      if (line.empty()) continue;
      try {
        std::size_t pos = 0;
        g.labels.push_back(std::stoi(line, &pos));
      } catch (const std::exception&) {
        parse_fail(*label_path, lineno, "non-numeric label '" + line + "'");
      }
    }
    if (g.labels.size() != g.n)
      throw ParseError(*label_path + ": " + std::to_string(g.labels.size()) +
                       " labels for " + std::to_string(g.n) + " nodes");
  }
  return g;
}

void save_graph(const Graph& g, const std::string& edge_path, const std::string& feature_path,
                const std::optional<std::string>& label_path) {
  std::ofstream ef(edge_path);
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = i + 1; j < g.n; ++j)
      if (g.adjacency(i, j) != 0.0) ef << i << " " << j << "\n";

  std::ofstream ff(feature_path);
  ff.precision(17);
  for (std::size_t i = 0; i < g.n; ++i) {
    for (std::size_t j = 0; j < g.features.cols(); ++j) {
      if (j) ff << ",";
      ff << g.features(i, j);
    }
    ff << "\n";
  }

  if (label_path && !g.labels.empty()) {
    std::ofstream lf(*label_path);
    for (int y : g.labels) lf << y << "\n";
  }
}

Mat normalize_adjacency(const Graph& g) {
  const std::size_t n = g.n;
  std::vector<double> dinv(n);
  for (std::size_t i = 0; i < n; ++i) {
    double deg = 1.0;  // self-loop
    for (std::size_t j = 0; j < n; ++j) deg += g.adjacency(i, j);
    dinv[i] = 1.0 / std::sqrt(deg);
  }
  Mat out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double a = g.adjacency(i, j) + (i == j ? 1.0 : 0.0);
      if (a != 0.0) out(i, j) = a * dinv[i] * dinv[j];
    }
  return out;
}

Mat normalized_laplacian(const Graph& g) {
  Mat l = normalize_adjacency(g);
  for (auto& v : l.vec()) v = -v;
  for (std::size_t i = 0; i < g.n; ++i) l(i, i) += 1.0;
  return l;
}

Split make_splits(std::size_t n, double train_frac, double val_frac, std::uint64_t seed) {
  if (train_frac <= 0.0 || val_frac <= 0.0 || train_frac + val_frac > 1.0)
    throw ContractError("make_splits: fractions must be positive and sum to at most 1");
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  Rng64 rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);

  const auto n_train = static_cast<std::size_t>(std::llround(train_frac * n));
  const auto n_val = static_cast<std::size_t>(std::llround(val_frac * n));
  Split s;
  s.seed = seed;
  s.train.assign(idx.begin(), idx.begin() + n_train);
  s.val.assign(idx.begin() + n_train, idx.begin() + n_train + n_val);
  s.test.assign(idx.begin() + n_train + n_val, idx.end());
  return s;
}

}  // namespace lac
