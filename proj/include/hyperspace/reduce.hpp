#pragma once

#include "hyperspace/datamat.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string_view>
#include <vector>

namespace hyperspace {

enum class ReduceMethod { PCA, PPCA, MDS, ICA, TSNE };

ReduceMethod parse_reduce_method(std::string_view name);
std::string_view to_string(ReduceMethod method);

/// A fitted linear reduction.
///
/// `components` is k x F with orthonormal rows for PCA/PPCA; each row is
/// oriented so that its largest-magnitude entry is positive.
struct ReductionModel {
  ReduceMethod method = ReduceMethod::PCA;
  Eigen::VectorXd mean;
  Eigen::MatrixXd components;
  Eigen::VectorXd explained_variance;
  double noise_variance = 0.0;

  Eigen::Index n_components() const { return components.rows(); }
  Eigen::Index n_features() const { return components.cols(); }
};

/// Flips each row of `rows` so its largest-|entry| is positive (first such
/// entry on ties).
void orient_rows(Eigen::MatrixXd& rows);
/// Column variant of orient_rows.
void orient_columns(Eigen::MatrixXd& cols);

/// Names "dim0".."dim{k-1}" for reduced output.
std::vector<std::string> dimension_names(Eigen::Index k);

// ---------------------------------------------------------------------------

/// PCA via thin SVD of the centered matrix; requires 1 <= ndims <= min(S-1, F).
ReductionModel fit_pca(const DataMatrix& data, int ndims);

/// Projects (values - mean) onto the model components. PCA/PPCA only.
DataMatrix transform(const ReductionModel& model, const DataMatrix& data);

/// Maps reduced coordinates back to feature space: mean + scores * components.
Eigen::MatrixXd inverse_transform(const ReductionModel& model, const Eigen::MatrixXd& scores);

struct PpcaOptions {
  double tol = 1e-6;
  int max_iter = 500;
};

struct PpcaResult {
  ReductionModel model;
  DataMatrix completed;              // missing entries filled, mask cleared
  std::vector<double> log_likelihood;  // expected complete-data log-likelihood per iteration
  int iterations = 0;
  bool converged = false;
};

/// EM for probabilistic PCA with missing entries handled by conditioning each
/// row on its observed coordinates.
PpcaResult fit_ppca(const DataMatrix& data, int ndims, const PpcaOptions& options = {});

/// Classical (Torgerson) MDS embedding, S x ndims.
DataMatrix fit_mds(const DataMatrix& data, int ndims);

struct IcaOptions {
  std::uint64_t seed = 0;
  double tol = 1e-6;
  int max_iter = 300;
};

struct IcaResult {
  DataMatrix sources;  // S x ndims, unit population variance per column
  Eigen::MatrixXd unmixing;  // ndims x ndims rotation applied to whitened data
  int iterations = 0;
  bool converged = false;
};

/// FastICA: PCA whitening, symmetric decorrelation, logcosh contrast.
IcaResult fit_ica(const DataMatrix& data, int ndims, const IcaOptions& options = {});

struct TsneOptions {
  double perplexity = 30.0;
  std::uint64_t seed = 0;
  int iters = 1000;
  double learning_rate = 200.0;
  double early_exaggeration = 12.0;
  int exaggeration_iters = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  int momentum_switch_iter = 250;
  double entropy_tol = 1e-5;
};

/// Input-space affinities of exact t-SNE.
struct TsneAffinities {
  Eigen::MatrixXd conditional;  // row i is p(j | i); rows sum to 1
  Eigen::VectorXd beta;         // per-row precision 1 / (2 sigma_i^2) on squared distances
  Eigen::MatrixXd joint;        // (P + P^T) / 2S
};

TsneAffinities tsne_affinities(const Eigen::MatrixXd& x, double perplexity, double entropy_tol = 1e-5);

struct TsneResult {
  DataMatrix embedding;
  TsneAffinities affinities;
  std::vector<double> kl_divergence;  // sampled every 50 iterations
};

/// Exact O(S^2) t-SNE; ndims must be 2 or 3 and 2 <= perplexity <= (S-1)/3.
TsneResult fit_tsne(const DataMatrix& data, int ndims, const TsneOptions& options = {});

struct DescribeResult {
  std::vector<int> n_components;
  std::vector<double> correlations;
};

/// Correlation between the upper triangles of the across-sample covariance of
/// the original and PCA-reduced data for k = 1, 2, ... until the first
/// non-increase at k >= 3. The returned curve ends at the local maximum.
DescribeResult describe_pca(const DataMatrix& data);

/// Across-sample covariance: X_c X_c^T / F for column-centered X.
Eigen::MatrixXd across_sample_covariance(const Eigen::MatrixXd& centered);

struct ReduceOptions {
  ReduceMethod method = ReduceMethod::PCA;
  int ndims = 3;
  std::uint64_t seed = 0;
  double perplexity = 30.0;
  int tsne_iters = 1000;
  PpcaOptions ppca;
};

/// Joint reduction: stack, fit once, transform each block with the shared
/// model, split back.
DataList reduce_list(const DataList& data, const ReduceOptions& options);

}  // namespace hyperspace
