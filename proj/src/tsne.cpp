#include "hyperspace/error.hpp"
#include "hyperspace/reduce.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace hyperspace {

namespace {

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& x) {
  const Eigen::VectorXd norms = x.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = (-2.0 * x * x.transpose()).colwise() + norms;
  d2.rowwise() += norms.transpose();
  d2 = d2.cwiseMax(0.0);
  d2.diagonal().setZero();
  return d2;
}

}  // namespace

TsneAffinities tsne_affinities(const Eigen::MatrixXd& x, double perplexity, double entropy_tol) {
  const Eigen::Index s = x.rows();
  const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  const Eigen::MatrixXd d2 = squared_distances(centered);
  const double target = std::log(perplexity);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  TsneAffinities out;
  out.conditional = Eigen::MatrixXd::Zero(s, s);
  out.beta.resize(s);
  Eigen::VectorXd p(s);
  for (Eigen::Index i = 0; i < s; ++i) {
    double dmin = kInf;
    for (Eigen::Index j = 0; j < s; ++j) {
      if (j != i) dmin = std::min(dmin, d2(i, j));
    }
    double beta = 1.0;
    double lo = -kInf;
    double hi = kInf;
    for (int step = 0; step < 1000; ++step) {
      double sum = 0.0;
      double weighted = 0.0;
      for (Eigen::Index j = 0; j < s; ++j) {
        const double shifted = d2(i, j) - dmin;
        p(j) = j == i ? 0.0 : std::exp(-beta * shifted);
        sum += p(j);
        weighted += shifted * p(j);
      }
      const double entropy = std::log(sum) + beta * weighted / sum;
      const double diff = entropy - target;
      if (std::abs(diff) < entropy_tol) break;
      if (diff > 0) {
        lo = beta;
        beta = hi == kInf ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = lo == -kInf ? beta / 2.0 : 0.5 * (beta + lo);
      }
    }
    // Final probabilities at the returned beta.
    double sum = 0.0;
    for (Eigen::Index j = 0; j < s; ++j) {
      p(j) = j == i ? 0.0 : std::exp(-beta * (d2(i, j) - dmin));
      sum += p(j);
    }
    out.conditional.row(i) = (p / sum).transpose();
    out.beta(i) = beta;
  }
  out.joint = (out.conditional + out.conditional.transpose()) / (2.0 * static_cast<double>(s));
  return out;
}

TsneResult fit_tsne(const DataMatrix& data, int ndims, const TsneOptions& options) {
  data.require_complete("t-SNE");
  const auto s = static_cast<Eigen::Index>(data.rows());
  if (ndims != 2 && ndims != 3) throw UsageError("t-SNE: ndims must be 2 or 3");
  const double max_perplexity = static_cast<double>(s - 1) / 3.0;
  if (!(options.perplexity >= 2.0 && options.perplexity <= max_perplexity)) {
    throw UsageError("t-SNE: perplexity must be in [2, " + std::to_string(max_perplexity) +
                     "] for " + std::to_string(s) + " samples");
  }
  if (options.iters < 1) throw UsageError("t-SNE: iters must be positive");

  TsneAffinities aff = tsne_affinities(data.values(), options.perplexity, options.entropy_tol);
  const Eigen::MatrixXd p = aff.joint.cwiseMax(1e-12);

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1e-4);
  Eigen::MatrixXd y(s, ndims);
  for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = normal(rng);

  Eigen::MatrixXd update = Eigen::MatrixXd::Zero(s, ndims);
  Eigen::MatrixXd gains = Eigen::MatrixXd::Ones(s, ndims);
  Eigen::MatrixXd num(s, s);
  Eigen::MatrixXd grad(s, ndims);
  std::vector<double> kl;

  for (int iter = 0; iter < options.iters; ++iter) {
    const double exaggeration = iter < options.exaggeration_iters ? options.early_exaggeration : 1.0;
    const double momentum =
        iter < options.momentum_switch_iter ? options.initial_momentum : options.final_momentum;

    num = (1.0 + squared_distances(y).array()).inverse().matrix();
    num.diagonal().setZero();
    const double num_sum = num.sum();

    // grad_i = 4 sum_j (exag p_ij - q_ij) num_ij (y_i - y_j)
    const Eigen::MatrixXd q = (num / num_sum).cwiseMax(1e-12);
    Eigen::MatrixXd mult = (exaggeration * p - q).cwiseProduct(num);
    mult.diagonal().setZero();
    grad = 4.0 * (mult.rowwise().sum().asDiagonal() * y - mult * y);

    for (Eigen::Index i = 0; i < gains.size(); ++i) {
      const bool same_sign = (grad.data()[i] > 0.0) == (update.data()[i] > 0.0);
      double& gain = gains.data()[i];
      gain = same_sign ? gain * 0.8 : gain + 0.2;
      gain = std::max(gain, 0.01);
    }
    update = momentum * update - options.learning_rate * gains.cwiseProduct(grad);
    y += update;
    y.rowwise() -= y.colwise().mean();

    if ((iter + 1) % 50 == 0 || iter + 1 == options.iters) {
      double cost = 0.0;
      for (Eigen::Index i = 0; i < s; ++i) {
        for (Eigen::Index j = 0; j < s; ++j) {
          if (i == j) continue;
          const double q = std::max(num(i, j) / num_sum, 1e-12);
          cost += p(i, j) * std::log(p(i, j) / q);
        }
      }
      kl.push_back(cost);
    }
  }

  return TsneResult{DataMatrix(std::move(y), dimension_names(ndims)), std::move(aff), std::move(kl)};
}

}  // namespace hyperspace
