#include "hyperspace/align.hpp"

#include "hyperspace/error.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace hyperspace {

Eigen::MatrixXd AlignmentTransform::apply(const Eigen::MatrixXd& x) const {
  if (x.cols() != rotation.rows()) {
    throw DataError("alignment transform expects " + std::to_string(rotation.rows()) + " columns");
  }
  return ((scale * (x.rowwise() - source_offset.transpose())) * rotation).rowwise() +
         target_offset.transpose();
}

ProcrustesResult procrustes(const DataMatrix& source, const DataMatrix& target,
                            const ProcrustesOptions& options) {
  if (source.rows() != target.rows() || source.cols() != target.cols()) {
    throw DataError("procrustes: source is " + std::to_string(source.rows()) + "x" +
                    std::to_string(source.cols()) + " but target is " +
                    std::to_string(target.rows()) + "x" + std::to_string(target.cols()));
  }
  source.require_complete("procrustes");
  target.require_complete("procrustes");

  AlignmentTransform t;
  t.source_offset = source.values().colwise().mean().transpose();
  t.target_offset = target.values().colwise().mean().transpose();
  const Eigen::MatrixXd a = source.values().rowwise() - t.source_offset.transpose();
  const Eigen::MatrixXd b = target.values().rowwise() - t.target_offset.transpose();
  const double a_norm2 = a.squaredNorm();
  const double b_norm2 = b.squaredNorm();
  if (!(b_norm2 > 0.0)) throw DataError("procrustes: target points are all identical");
  if (!(a_norm2 > 0.0)) throw DataError("procrustes: source points are all identical");

  Eigen::BDCSVD<Eigen::MatrixXd> svd(a.transpose() * b, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::MatrixXd u = svd.matrixU();
  Eigen::VectorXd sv = svd.singularValues();
  if (!options.allow_reflection && (u * svd.matrixV().transpose()).determinant() < 0.0) {
    const Eigen::Index last = u.cols() - 1;
    u.col(last) *= -1.0;
    sv(last) *= -1.0;
  }
  t.rotation = u * svd.matrixV().transpose();
  if (options.scaling) {
    t.scale = sv.sum() / a_norm2;
    if (!(t.scale > 0.0)) throw DataError("procrustes: source and target are uncorrelated");
  }

  Eigen::MatrixXd aligned = t.apply(source.values());
  const double residual = (aligned - target.values()).norm();
  return {target.with_values(std::move(aligned)), std::move(t), residual};
}

HyperalignResult hyperalign(const DataList& data, int n_passes, const ProcrustesOptions& options) {
  if (data.size() < 2) throw UsageError("hyperalign: at least two datasets are required");
  if (n_passes < 1) throw UsageError("hyperalign: n_passes must be at least 1");
  for (const auto& m : data) {
    if (m.rows() != data.front().rows() || m.cols() != data.front().cols()) {
      throw DataError("hyperalign: all datasets must share the same shape");
    }
    m.require_complete("hyperalign");
  }
  const auto count = static_cast<double>(data.size());

  // Templates sit at the mean of the input centroids so the output offset does
  // not depend on dataset order.
  Eigen::RowVectorXd centroid = Eigen::RowVectorXd::Zero(data.front().values().cols());
  for (const auto& m : data) centroid += m.values().colwise().mean() / count;
  auto recenter = [&](const Eigen::MatrixXd& t) {
    return DataMatrix((t.rowwise() - t.colwise().mean()).rowwise() + centroid);
  };

  // Pass 1: running-mean template.
  Eigen::MatrixXd sum = data.front().values();
  for (std::size_t i = 1; i < data.size(); ++i) {
    const DataMatrix running(sum / static_cast<double>(i));
    sum += procrustes(data[i], running, options).aligned.values();
  }
  DataMatrix templ = recenter(sum / count);

  for (int pass = 1; pass < n_passes; ++pass) {
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(sum.rows(), sum.cols());
    for (const auto& m : data) next += procrustes(m, templ, options).aligned.values();
    templ = recenter(next / count);
  }

  HyperalignResult result{{}, {}, templ};
  for (const auto& m : data) {
    auto fit = procrustes(m, templ, options);
    result.aligned.push_back(m.with_values(fit.aligned.values()));
    result.transforms.push_back(std::move(fit.transform));
  }
  return result;
}

double matrix_correlation(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DataError("matrix_correlation: shapes differ");
  }
  const Eigen::ArrayXd da = a.reshaped().array() - a.mean();
  const Eigen::ArrayXd db = b.reshaped().array() - b.mean();
  const double denom = std::sqrt((da * da).sum() * (db * db).sum());
  if (!(denom > 0.0)) return 0.0;
  return (da * db).sum() / denom;
}

double mean_pairwise_correlation(const DataList& data) {
  if (data.size() < 2) throw UsageError("mean_pairwise_correlation: need at least two matrices");
  double total = 0.0;
  int pairs = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = i + 1; j < data.size(); ++j) {
      total += matrix_correlation(data[i].values(), data[j].values());
      ++pairs;
    }
  }
  return total / pairs;
}

}  // namespace hyperspace
