#include "hyperspace/error.hpp"
#include "hyperspace/reduce.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace hyperspace {

namespace {

Eigen::VectorXd upper_triangle(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  Eigen::VectorXd out(n * (n - 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) out(k++) = m(i, j);
  }
  return out;
}

// Pearson correlation; 0 when either side has no spread.
double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::ArrayXd da = a.array() - a.mean();
  const Eigen::ArrayXd db = b.array() - b.mean();
  const double denom = std::sqrt((da * da).sum() * (db * db).sum());
  if (!(denom > 0.0)) return 0.0;
  return std::clamp((da * db).sum() / denom, -1.0, 1.0);
}

}  // namespace

Eigen::MatrixXd across_sample_covariance(const Eigen::MatrixXd& centered) {
  return centered * centered.transpose() / static_cast<double>(centered.cols());
}

DescribeResult describe_pca(const DataMatrix& data) {
  data.require_complete("describe_pca");
  const auto s = static_cast<Eigen::Index>(data.rows());
  const auto f = static_cast<Eigen::Index>(data.cols());
  if (s < 3) throw UsageError("describe_pca: at least 3 samples are required");

  const Eigen::MatrixXd centered = data.values().rowwise() - data.values().colwise().mean();
  const Eigen::VectorXd full = upper_triangle(across_sample_covariance(centered));
  const double spread = (full.array() - full.mean()).abs().maxCoeff();
  if (!(spread > 1e-14 * std::max(1.0, full.cwiseAbs().maxCoeff())) ||
      centered.cwiseAbs().maxCoeff() == 0.0) {
    throw DataError("describe_pca: data has no across-sample covariance structure (constant data?)");
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU);
  const Eigen::Index k_max = std::min(s - 1, f);

  // PCA scores for k components are U_k diag(s_k); their across-sample
  // covariance grows by one rank-one term per component.
  Eigen::MatrixXd reduced = Eigen::MatrixXd::Zero(s, s);
  DescribeResult result;
  for (Eigen::Index k = 1; k <= k_max; ++k) {
    const double sv = svd.singularValues()(k - 1);
    const Eigen::VectorXd u = svd.matrixU().col(k - 1);
    reduced.noalias() += (sv * sv) * (u * u.transpose());
    const double corr = pearson(upper_triangle(reduced / static_cast<double>(k)), full);

    if (k >= 3 && corr <= result.correlations.back() + 1e-12) break;
    result.n_components.push_back(static_cast<int>(k));
    result.correlations.push_back(corr);
  }
  return result;
}

}  // namespace hyperspace
