#include "hyperspace/error.hpp"
#include "hyperspace/reduce.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <random>

namespace hyperspace {

namespace {

// (W W^T)^{-1/2} W
Eigen::MatrixXd symmetric_decorrelation(const Eigen::MatrixXd& w) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w * w.transpose());
  const Eigen::VectorXd inv_sqrt = eig.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  return eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose() * w;
}

}  // namespace

IcaResult fit_ica(const DataMatrix& data, int ndims, const IcaOptions& options) {
  data.require_complete("ICA");
  const auto s = static_cast<Eigen::Index>(data.rows());
  const auto f = static_cast<Eigen::Index>(data.cols());
  if (ndims < 1 || ndims > f || ndims > s - 1) {
    throw UsageError("ICA: ndims must be in [1, " + std::to_string(std::min(f, s - 1)) + "], got " +
                     std::to_string(ndims));
  }
  const Eigen::MatrixXd centered = data.values().rowwise() - data.values().colwise().mean();

  // PCA whitening to ndims with unit population variance per column.
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU);
  const Eigen::VectorXd sv = svd.singularValues().head(ndims);
  if (sv(ndims - 1) <= 1e-12 * std::max(sv(0), 1e-300)) {
    throw DataError("ICA: data rank is below ndims = " + std::to_string(ndims));
  }
  const Eigen::MatrixXd white = svd.matrixU().leftCols(ndims) * std::sqrt(static_cast<double>(s));

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd w(ndims, ndims);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = normal(rng);
  w = symmetric_decorrelation(w);

  IcaResult result{DataMatrix(Eigen::MatrixXd::Zero(1, 1)), {}, 0, false};
  const double inv_s = 1.0 / static_cast<double>(s);
  for (int iter = 0; iter < options.max_iter; ++iter) {
    const Eigen::MatrixXd projected = white * w.transpose();  // S x k
    const Eigen::MatrixXd g = projected.array().tanh().matrix();
    const Eigen::VectorXd g_prime_mean = (1.0 - g.array().square()).colwise().mean().transpose();
    Eigen::MatrixXd next = (g.transpose() * white) * inv_s - g_prime_mean.asDiagonal() * w;
    next = symmetric_decorrelation(next);
    // 1 - |cos| of the angle between old and new rows.
    const double change = ((next * w.transpose()).diagonal().cwiseAbs().array() - 1.0).abs().maxCoeff();
    w = std::move(next);
    result.iterations = iter + 1;
    if (change < options.tol) {
      result.converged = true;
      break;
    }
  }

  Eigen::MatrixXd sources = white * w.transpose();
  sources.rowwise() -= sources.colwise().mean();
  for (Eigen::Index c = 0; c < sources.cols(); ++c) {
    const double sd = std::sqrt(sources.col(c).squaredNorm() * inv_s);
    if (sd > 0.0) sources.col(c) /= sd;
  }
  result.unmixing = w;
  result.sources = DataMatrix(std::move(sources), dimension_names(ndims));
  return result;
}

}  // namespace hyperspace
