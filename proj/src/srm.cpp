#include "hyperspace/align.hpp"
#include "hyperspace/error.hpp"
#include "hyperspace/reduce.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <random>

namespace hyperspace {

namespace {

// argmin_W ||X - S W^T||_F subject to W^T W = I, i.e. the polar factor of X^T S.
Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& x, const Eigen::MatrixXd& shared) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(x.transpose() * shared, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().transpose();
}

Eigen::MatrixXd mean_projection(const DataList& data, const std::vector<Eigen::MatrixXd>& bases) {
  Eigen::MatrixXd shared = Eigen::MatrixXd::Zero(data.front().values().rows(), bases.front().cols());
  for (std::size_t i = 0; i < data.size(); ++i) shared.noalias() += data[i].values() * bases[i];
  return shared / static_cast<double>(data.size());
}

}  // namespace

double srm_objective(const DataList& data, const SrmModel& model) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    total += (data[i].values() - model.shared * model.bases[i].transpose()).squaredNorm();
  }
  return total;
}

SrmResult srm(const DataList& data, int k, int n_iter, std::uint64_t seed) {
  if (data.size() < 2) throw UsageError("srm: at least two datasets are required");
  if (n_iter < 0) throw UsageError("srm: n_iter must be non-negative");
  const auto s = data.front().rows();
  std::size_t limit = s;
  for (const auto& m : data) {
    if (m.rows() != s) throw DataError("srm: all datasets must have the same number of samples");
    m.require_complete("srm");
    limit = std::min(limit, m.cols());
  }
  if (k < 1 || static_cast<std::size_t>(k) > limit) {
    throw UsageError("srm: k must be in [1, " + std::to_string(limit) + "], got " + std::to_string(k));
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SrmModel model;
  for (const auto& m : data) {
    Eigen::MatrixXd random(static_cast<Eigen::Index>(m.cols()), k);
    for (Eigen::Index i = 0; i < random.size(); ++i) random.data()[i] = normal(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(random);
    model.bases.push_back(qr.householderQ() * Eigen::MatrixXd::Identity(random.rows(), k));
  }
  model.shared = mean_projection(data, model.bases);
  model.objective.push_back(srm_objective(data, model));

  for (int iter = 0; iter < n_iter; ++iter) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      model.bases[i] = orthonormal_basis(data[i].values(), model.shared);
    }
    model.shared = mean_projection(data, model.bases);
    model.objective.push_back(srm_objective(data, model));
  }

  // Rotate the shared space onto its principal axes with a fixed sign
  // convention; the objective is invariant under this rotation.
  Eigen::BDCSVD<Eigen::MatrixXd> svd(model.shared, Eigen::ComputeThinV);
  Eigen::MatrixXd rotation = svd.matrixV();
  Eigen::MatrixXd rotated = model.shared * rotation;
  for (Eigen::Index c = 0; c < rotated.cols(); ++c) {
    Eigen::Index arg = 0;
    rotated.col(c).cwiseAbs().maxCoeff(&arg);
    if (rotated(arg, c) < 0.0) {
      rotated.col(c) *= -1.0;
      rotation.col(c) *= -1.0;
    }
  }
  model.shared = std::move(rotated);
  for (auto& w : model.bases) w = w * rotation;

  SrmResult result;
  const auto names = dimension_names(k);
  for (std::size_t i = 0; i < data.size(); ++i) {
    result.projected.emplace_back(data[i].values() * model.bases[i], names);
  }
  result.model = std::move(model);
  return result;
}

}  // namespace hyperspace
