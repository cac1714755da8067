#pragma once

#include "hyperspace/datamat.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace hyperspace {

struct ClusterAssignment {
  std::vector<int> labels;           // in [0, k), canonical first-occurrence order
  Eigen::MatrixXd centroids;         // k x F, row c is the centroid of label c
  double inertia = 0.0;              // sum of squared distances to assigned centroids
  std::vector<int> empty_clusters;   // labels with no members (normally empty)
  int iterations = 0;                // Lloyd iterations of the winning restart
  int best_restart = 0;
  std::vector<double> restart_inertia;  // final inertia of every restart
  std::vector<double> inertia_history;  // winning restart, after each assignment
};

struct KMeansOptions {
  int k = 8;
  std::uint64_t seed = 0;
  int n_init = 10;
  int max_iter = 300;
};

/// k-means++ seeding, Lloyd iterations, best of n_init restarts by
/// (inertia, restart index).
ClusterAssignment kmeans(const DataMatrix& data, const KMeansOptions& options);

/// Clusters the row-stack of `data` jointly and splits labels back per matrix.
std::vector<std::vector<int>> kmeans_list(const DataList& data, const KMeansOptions& options,
                                          ClusterAssignment* joint = nullptr);

/// Relabels so the first sample gets 0 and new labels follow first occurrence.
/// Returns the old->new mapping (size = max label + 1, -1 for unused).
std::vector<int> canonical_relabel(std::vector<int>& labels);

/// Chance-corrected agreement of two partitions (1.0 = identical).
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace hyperspace
