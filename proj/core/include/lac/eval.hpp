#pragma once

#include <cstdint>
#include <vector>

#include "lac/graph.hpp"
#include "lac/linalg.hpp"

namespace lac {

struct ClassificationResult {
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> per_run;
};

struct ClassifierSettings {
  std::size_t epochs = 300;
  double lr = 1e-2;
  double weight_decay = 1e-5;
};

/// Trains a multinomial logistic regression on the frozen embeddings over the
/// train split and reports test accuracy across `repeats` seeded runs.
ClassificationResult evaluate_classification(const Mat& z, const std::vector<int>& labels,
                                             const Split& split, std::size_t repeats,
                                             const ClassifierSettings& settings = {});

struct ClusteringResult {
  double nmi = 0.0;
  double ari = 0.0;
};

/// Seeded k-means++ with restarts on L2-normalized embeddings, scored against
/// the labels.
ClusteringResult evaluate_clustering(const Mat& z, const std::vector<int>& labels, std::size_t k,
                                     std::size_t restarts = 50, std::uint64_t seed = 0);

/// k-means assignment vector for the best-inertia restart.
std::vector<int> kmeans(const Mat& points, std::size_t k, std::size_t restarts,
                        std::uint64_t seed);

double normalized_mutual_information(const std::vector<int>& a, const std::vector<int>& b);
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace lac
