#include "hyperspace/cluster.hpp"

#include "hyperspace/error.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <random>

namespace hyperspace {

namespace {

struct Run {
  std::vector<int> labels;
  Eigen::MatrixXd centroids;
  double inertia = 0.0;
  int iterations = 0;
  std::vector<double> history;
};

Eigen::MatrixXd plus_plus_init(const Eigen::MatrixXd& x, int k, std::mt19937_64& rng) {
  const Eigen::Index s = x.rows();
  Eigen::MatrixXd centers(k, x.cols());
  std::vector<bool> chosen(static_cast<std::size_t>(s), false);
  std::uniform_int_distribution<Eigen::Index> first(0, s - 1);
  Eigen::Index pick = first(rng);
  centers.row(0) = x.row(pick);
  chosen[static_cast<std::size_t>(pick)] = true;

  Eigen::VectorXd d2 = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    if (total > 0.0) {
      const double target = unit(rng) * total;
      double acc = 0.0;
      pick = s - 1;
      for (Eigen::Index i = 0; i < s; ++i) {
        acc += d2(i);
        if (acc > target && d2(i) > 0.0) {
          pick = i;
          break;
        }
      }
      while (d2(pick) <= 0.0 && pick > 0) --pick;
    } else {
      // Every point coincides with a centre: take an unused index uniformly.
      std::vector<Eigen::Index> unused;
      for (Eigen::Index i = 0; i < s; ++i) {
        if (!chosen[static_cast<std::size_t>(i)]) unused.push_back(i);
      }
      std::uniform_int_distribution<std::size_t> any(0, unused.size() - 1);
      pick = unused[any(rng)];
    }
    centers.row(c) = x.row(pick);
    chosen[static_cast<std::size_t>(pick)] = true;
    d2 = d2.cwiseMin((x.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

// Nearest centre per row (lowest index on ties); returns inertia.
double assign(const Eigen::MatrixXd& x, const Eigen::MatrixXd& centers, std::vector<int>& labels,
              Eigen::VectorXd& dist) {
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < centers.rows(); ++c) {
      const double d = (x.row(i) - centers.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
    dist(i) = best_d;
    inertia += best_d;
  }
  return inertia;
}

double recompute_inertia(const Eigen::MatrixXd& x, const Eigen::MatrixXd& centers,
                         const std::vector<int>& labels) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    total += (x.row(i) - centers.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
  }
  return total;
}

Run lloyd(const Eigen::MatrixXd& x, int k, int max_iter, std::mt19937_64& rng) {
  Run run;
  run.centroids = plus_plus_init(x, k, rng);
  run.labels.assign(static_cast<std::size_t>(x.rows()), -1);
  std::vector<int> labels(run.labels.size());
  Eigen::VectorXd dist(x.rows());

  for (int iter = 0; iter < max_iter; ++iter) {
    run.history.push_back(assign(x, run.centroids, labels, dist));
    run.iterations = iter + 1;
    if (labels == run.labels) break;
    run.labels = labels;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const int c = labels[static_cast<std::size_t>(i)];
      sums.row(c) += x.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        run.centroids.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
        continue;
      }
      // Empty cluster: move it onto the point farthest from its own centre.
      Eigen::Index far = 0;
      dist.maxCoeff(&far);
      run.centroids.row(c) = x.row(far);
      dist(far) = 0.0;
    }
  }
  run.inertia = recompute_inertia(x, run.centroids, run.labels);
  return run;
}

}  // namespace

std::vector<int> canonical_relabel(std::vector<int>& labels) {
  int max_label = -1;
  for (int l : labels) max_label = std::max(max_label, l);
  std::vector<int> mapping(static_cast<std::size_t>(max_label + 1), -1);
  int next = 0;
  for (int& l : labels) {
    auto& m = mapping[static_cast<std::size_t>(l)];
    if (m < 0) m = next++;
    l = m;
  }
  return mapping;
}

ClusterAssignment kmeans(const DataMatrix& data, const KMeansOptions& options) {
  data.require_complete("kmeans");
  const auto s = static_cast<int>(data.rows());
  if (options.k < 1) throw UsageError("kmeans: k must be at least 1");
  if (options.k > s) {
    throw UsageError("kmeans: k = " + std::to_string(options.k) + " exceeds the number of samples (" +
                     std::to_string(s) + ")");
  }
  if (options.n_init < 1) throw UsageError("kmeans: n_init must be at least 1");
  if (options.max_iter < 1) throw UsageError("kmeans: max_iter must be at least 1");

  const Eigen::MatrixXd& x = data.values();
  ClusterAssignment out;
  Run best;
  for (int r = 0; r < options.n_init; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed),
                      static_cast<std::uint32_t>(options.seed >> 32), static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    Run run = lloyd(x, options.k, options.max_iter, rng);
    out.restart_inertia.push_back(run.inertia);
    if (r == 0 || run.inertia < best.inertia) {
      best = std::move(run);
      out.best_restart = r;
    }
  }

  std::vector<int> mapping = canonical_relabel(best.labels);
  mapping.resize(static_cast<std::size_t>(options.k), -1);
  int next = 0;
  for (int m : mapping) next = std::max(next, m + 1);
  out.centroids.resize(options.k, x.cols());
  for (int old = 0; old < options.k; ++old) {
    int& target = mapping[static_cast<std::size_t>(old)];
    if (target < 0) {
      target = next++;
      out.empty_clusters.push_back(target);
    }
    out.centroids.row(target) = best.centroids.row(old);
  }
  std::sort(out.empty_clusters.begin(), out.empty_clusters.end());
  out.labels = std::move(best.labels);
  out.inertia = recompute_inertia(x, out.centroids, out.labels);
  out.iterations = best.iterations;
  out.inertia_history = std::move(best.history);
  return out;
}

std::vector<std::vector<int>> kmeans_list(const DataList& data, const KMeansOptions& options,
                                          ClusterAssignment* joint) {
  ClusterAssignment fit = kmeans(stack(data), options);
  std::vector<std::vector<int>> out;
  std::size_t offset = 0;
  for (const auto& m : data) {
    out.emplace_back(fit.labels.begin() + static_cast<std::ptrdiff_t>(offset),
                     fit.labels.begin() + static_cast<std::ptrdiff_t>(offset + m.rows()));
    offset += m.rows();
  }
  if (joint) *joint = std::move(fit);
  return out;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw DataError("adjusted_rand_index: label vectors differ in length");
  const double n = static_cast<double>(a.size());
  if (a.size() < 2) return 1.0;
  auto choose2 = [](double v) { return v * (v - 1.0) / 2.0; };

  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> row;
  std::map<int, double> col;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1.0;
    row[a[i]] += 1.0;
    col[b[i]] += 1.0;
  }
  double index = 0.0;
  for (const auto& [_, v] : joint) index += choose2(v);
  double sum_a = 0.0;
  for (const auto& [_, v] : row) sum_a += choose2(v);
  double sum_b = 0.0;
  for (const auto& [_, v] : col) sum_b += choose2(v);
  const double expected = sum_a * sum_b / choose2(n);
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

}  // namespace hyperspace
