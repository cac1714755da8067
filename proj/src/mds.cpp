#include "hyperspace/error.hpp"
#include "hyperspace/reduce.hpp"

#include <Eigen/Eigenvalues>

namespace hyperspace {

DataMatrix fit_mds(const DataMatrix& data, int ndims) {
  data.require_complete("MDS");
  const auto s = static_cast<Eigen::Index>(data.rows());
  if (ndims < 1 || ndims > s - 1) {
    throw UsageError("MDS: ndims must be in [1, " + std::to_string(s - 1) + "], got " +
                     std::to_string(ndims));
  }
  // Distances are translation invariant; centering first limits cancellation.
  const Eigen::MatrixXd x = data.values().rowwise() - data.values().colwise().mean();

  // Squared Euclidean distances, then B = -1/2 J D^2 J.
  const Eigen::VectorXd norms = x.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = (-2.0 * x * x.transpose()).colwise() + norms;
  d2.rowwise() += norms.transpose();
  d2 = d2.cwiseMax(0.0);
  d2.diagonal().setZero();

  const Eigen::VectorXd row_mean = d2.rowwise().mean();
  const Eigen::VectorXd col_mean = d2.colwise().mean().transpose();
  const double grand = d2.mean();
  Eigen::MatrixXd b = d2;
  b.colwise() -= row_mean;
  b.rowwise() -= col_mean.transpose();
  b.array() += grand;
  b *= -0.5;
  b = 0.5 * (b + b.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b);
  // Eigen sorts ascending; take the top ndims from the end.
  Eigen::MatrixXd embedding(s, ndims);
  for (int i = 0; i < ndims; ++i) {
    const Eigen::Index idx = s - 1 - i;
    const double lambda = std::max(eig.eigenvalues()(idx), 0.0);
    embedding.col(i) = eig.eigenvectors().col(idx) * std::sqrt(lambda);
  }
  orient_columns(embedding);
  return DataMatrix(std::move(embedding), dimension_names(ndims));
}

}  // namespace hyperspace
