#pragma once

#include "hyperspace/datamat.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace hyperspace {

/// Similarity transform in row-vector convention:
///   y = scale * (x - source_offset) * rotation + target_offset
struct AlignmentTransform {
  Eigen::MatrixXd rotation;  // F x F orthogonal, det = +-1
  double scale = 1.0;
  Eigen::VectorXd source_offset;
  Eigen::VectorXd target_offset;

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
};

struct ProcrustesOptions {
  bool allow_reflection = true;
  bool scaling = true;
};

struct ProcrustesResult {
  DataMatrix aligned;
  AlignmentTransform transform;
  double residual = 0.0;  // Frobenius norm of aligned - target
};

/// Least-squares similarity transform of `source` onto `target`.
ProcrustesResult procrustes(const DataMatrix& source, const DataMatrix& target,
                            const ProcrustesOptions& options = {});

struct HyperalignResult {
  DataList aligned;
  std::vector<AlignmentTransform> transforms;
  DataMatrix template_matrix;
};

/// Iterative hyperalignment. Pass 1 builds a template by aligning each dataset
/// to the running mean of those before it; each further pass re-aligns every
/// original dataset to the current template and recomputes it. The outputs are
/// the originals aligned to the final template.
HyperalignResult hyperalign(const DataList& data, int n_passes = 2,
                            const ProcrustesOptions& options = {});

struct SrmModel {
  std::vector<Eigen::MatrixXd> bases;  // W_i, F_i x k, orthonormal columns
  Eigen::MatrixXd shared;              // S x k
  std::vector<double> objective;       // after init, then after each iteration
};

struct SrmResult {
  DataList projected;  // X_i W_i, each S x k
  SrmModel model;
};

/// Deterministic shared response model fit by alternating minimisation of
/// sum_i ||X_i - S W_i^T||_F^2. The final shared space is rotated onto its
/// principal axes, which leaves the objective unchanged.
SrmResult srm(const DataList& data, int k, int n_iter = 10, std::uint64_t seed = 0);

/// sum_i ||X_i - shared W_i^T||_F^2
double srm_objective(const DataList& data, const SrmModel& model);

/// Pearson correlation of two equally shaped matrices, flattened.
double matrix_correlation(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Mean of matrix_correlation over all unordered pairs.
double mean_pairwise_correlation(const DataList& data);

}  // namespace hyperspace
