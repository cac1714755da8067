#include "hyperspace/error.hpp"
#include "hyperspace/reduce.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cctype>
#include <cmath>

namespace hyperspace {

ReduceMethod parse_reduce_method(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "pca") return ReduceMethod::PCA;
  if (lower == "ppca") return ReduceMethod::PPCA;
  if (lower == "mds") return ReduceMethod::MDS;
  if (lower == "ica" || lower == "fastica") return ReduceMethod::ICA;
  if (lower == "tsne" || lower == "t-sne") return ReduceMethod::TSNE;
  throw UsageError("unknown reduction method '" + std::string(name) + "'");
}

std::string_view to_string(ReduceMethod method) {
  switch (method) {
    case ReduceMethod::PCA: return "pca";
    case ReduceMethod::PPCA: return "ppca";
    case ReduceMethod::MDS: return "mds";
    case ReduceMethod::ICA: return "ica";
    case ReduceMethod::TSNE: return "tsne";
  }
  return "pca";
}

void orient_rows(Eigen::MatrixXd& rows) {
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index c = 0; c < rows.cols(); ++c) {
      if (std::abs(rows(r, c)) > best) {
        best = std::abs(rows(r, c));
        arg = c;
      }
    }
    if (rows.cols() > 0 && rows(r, arg) < 0.0) rows.row(r) *= -1.0;
  }
}

void orient_columns(Eigen::MatrixXd& cols) {
  Eigen::MatrixXd t = cols.transpose();
  orient_rows(t);
  cols = t.transpose();
}

std::vector<std::string> dimension_names(Eigen::Index k) {
  std::vector<std::string> names;
  for (Eigen::Index i = 0; i < k; ++i) names.push_back("dim" + std::to_string(i));
  return names;
}

ReductionModel fit_pca(const DataMatrix& data, int ndims) {
  data.require_complete("PCA");
  const auto s = static_cast<int>(data.rows());
  const auto f = static_cast<int>(data.cols());
  const int max_dims = std::min(s - 1, f);
  if (ndims < 1 || ndims > max_dims) {
    throw UsageError("PCA: ndims must be in [1, " + std::to_string(max_dims) + "], got " +
                     std::to_string(ndims));
  }

  ReductionModel model;
  model.method = ReduceMethod::PCA;
  model.mean = data.values().colwise().mean().transpose();
  const Eigen::MatrixXd centered = data.values().rowwise() - model.mean.transpose();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  model.components = svd.matrixV().leftCols(ndims).transpose();
  orient_rows(model.components);
  model.explained_variance =
      svd.singularValues().head(ndims).array().square() / static_cast<double>(s);
  return model;
}

DataMatrix transform(const ReductionModel& model, const DataMatrix& data) {
  if (model.method != ReduceMethod::PCA && model.method != ReduceMethod::PPCA) {
    throw UsageError("transform: only PCA and PPCA models can project new data");
  }
  if (static_cast<Eigen::Index>(data.cols()) != model.n_features()) {
    throw DataError("transform: data has " + std::to_string(data.cols()) +
                    " features, model expects " + std::to_string(model.n_features()));
  }
  data.require_complete("transform");
  Eigen::MatrixXd scores =
      (data.values().rowwise() - model.mean.transpose()) * model.components.transpose();
  return DataMatrix(std::move(scores), dimension_names(model.n_components()));
}

Eigen::MatrixXd inverse_transform(const ReductionModel& model, const Eigen::MatrixXd& scores) {
  if (scores.cols() != model.n_components()) {
    throw DataError("inverse_transform: expected " + std::to_string(model.n_components()) +
                    " score columns");
  }
  return (scores * model.components).rowwise() + model.mean.transpose();
}

}  // namespace hyperspace
