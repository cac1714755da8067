#include "hyperspace/error.hpp"
#include "hyperspace/reduce.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <numbers>

namespace hyperspace {

namespace {

struct Posterior {
  Eigen::MatrixXd mean;               // S x k, E[x_n]
  std::vector<Eigen::MatrixXd> cov;   // k x k per row, Cov[x_n]
};

// Rows of the observed mask as index lists.
std::vector<std::vector<Eigen::Index>> observed_per_row(const MissingMask& missing) {
  std::vector<std::vector<Eigen::Index>> out(static_cast<std::size_t>(missing.rows()));
  for (Eigen::Index r = 0; r < missing.rows(); ++r) {
    for (Eigen::Index c = 0; c < missing.cols(); ++c) {
      if (!missing(r, c)) out[static_cast<std::size_t>(r)].push_back(c);
    }
  }
  return out;
}

Posterior e_step(const Eigen::MatrixXd& y, const std::vector<std::vector<Eigen::Index>>& observed,
                 const Eigen::VectorXd& mu, const Eigen::MatrixXd& w, double sigma2) {
  const Eigen::Index s = y.rows();
  const Eigen::Index k = w.cols();
  Posterior post;
  post.mean.resize(s, k);
  post.cov.resize(static_cast<std::size_t>(s));
  for (Eigen::Index n = 0; n < s; ++n) {
    const auto& obs = observed[static_cast<std::size_t>(n)];
    Eigen::MatrixXd precision = sigma2 * Eigen::MatrixXd::Identity(k, k);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
    for (Eigen::Index j : obs) {
      precision.noalias() += w.row(j).transpose() * w.row(j);
      rhs.noalias() += w.row(j).transpose() * (y(n, j) - mu(j));
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(precision);
    post.mean.row(n) = llt.solve(rhs).transpose();
    post.cov[static_cast<std::size_t>(n)] = sigma2 * llt.solve(Eigen::MatrixXd::Identity(k, k));
  }
  return post;
}

double expected_log_likelihood(const Eigen::MatrixXd& y,
                               const std::vector<std::vector<Eigen::Index>>& observed,
                               const Posterior& post, const Eigen::VectorXd& mu,
                               const Eigen::MatrixXd& w, double sigma2) {
  const double log2pi = std::log(2.0 * std::numbers::pi);
  const auto k = static_cast<double>(w.cols());
  double total = 0.0;
  for (Eigen::Index n = 0; n < y.rows(); ++n) {
    const auto& obs = observed[static_cast<std::size_t>(n)];
    const auto& cov = post.cov[static_cast<std::size_t>(n)];
    const Eigen::VectorXd xbar = post.mean.row(n).transpose();
    double sq = 0.0;
    for (Eigen::Index j : obs) {
      const double resid = y(n, j) - mu(j) - w.row(j).dot(xbar);
      sq += resid * resid + w.row(j) * cov * w.row(j).transpose();
    }
    total += -0.5 * static_cast<double>(obs.size()) * (log2pi + std::log(sigma2)) -
             0.5 * sq / sigma2 - 0.5 * k * log2pi - 0.5 * (xbar.squaredNorm() + cov.trace());
  }
  return total;
}

}  // namespace

PpcaResult fit_ppca(const DataMatrix& data, int ndims, const PpcaOptions& options) {
  const auto s = static_cast<Eigen::Index>(data.rows());
  const auto f = static_cast<Eigen::Index>(data.cols());
  if (ndims < 1 || ndims >= f) {
    throw UsageError("PPCA: ndims must be in [1, " + std::to_string(f - 1) + "], got " +
                     std::to_string(ndims));
  }
  if (options.max_iter < 1) throw UsageError("PPCA: max_iter must be positive");
  const auto& missing = data.missing();
  for (Eigen::Index r = 0; r < s; ++r) {
    if (missing.row(r).all()) throw DataError("PPCA: row " + std::to_string(r) + " is entirely missing");
  }
  for (Eigen::Index c = 0; c < f; ++c) {
    if (missing.col(c).all()) {
      throw DataError("PPCA: column '" + data.column_names()[static_cast<std::size_t>(c)] +
                      "' is entirely missing");
    }
  }

  const Eigen::MatrixXd& y = data.values();
  const auto observed = observed_per_row(missing);
  const Eigen::Index k = ndims;

  // Initialise at the closed-form ML solution for the mean-imputed matrix.
  Eigen::VectorXd mu(f);
  for (Eigen::Index c = 0; c < f; ++c) {
    double sum = 0.0;
    Eigen::Index count = 0;
    for (Eigen::Index r = 0; r < s; ++r) {
      if (!missing(r, c)) {
        sum += y(r, c);
        ++count;
      }
    }
    mu(c) = sum / static_cast<double>(count);
  }
  Eigen::MatrixXd filled = y;
  for (Eigen::Index c = 0; c < f; ++c) {
    for (Eigen::Index r = 0; r < s; ++r) filled(r, c) = missing(r, c) ? 0.0 : y(r, c) - mu(c);
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(filled, Eigen::ComputeThinV);
  Eigen::VectorXd eig = Eigen::VectorXd::Zero(f);
  eig.head(svd.singularValues().size()) =
      svd.singularValues().array().square() / static_cast<double>(s);
  const double scale = std::max(eig.mean(), 1e-300);
  const double sigma2_floor = 1e-12 * scale;
  double sigma2 = std::max(eig.tail(f - k).mean(), sigma2_floor);
  Eigen::MatrixXd w(f, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double excess = std::max(eig(i) - sigma2, 1e-6 * scale);
    w.col(i) = svd.matrixV().col(i) * std::sqrt(excess);
  }

  PpcaResult result{ReductionModel{}, data, {}, 0, false};
  double previous = 0.0;
  for (int iter = 0; iter < options.max_iter; ++iter) {
    const Posterior post = e_step(y, observed, mu, w, sigma2);

    // Joint M-step for (mu_j, w_j): regression of column j on [E[x_n]; 1].
    double sq_total = 0.0;
    Eigen::Index n_obs = 0;
    for (Eigen::Index j = 0; j < f; ++j) {
      Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(k + 1, k + 1);
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
      Eigen::VectorXd z(k + 1);
      for (Eigen::Index n = 0; n < s; ++n) {
        if (missing(n, j)) continue;
        z.head(k) = post.mean.row(n).transpose();
        z(k) = 1.0;
        gram.noalias() += z * z.transpose();
        gram.topLeftCorner(k, k) += post.cov[static_cast<std::size_t>(n)];
        rhs.noalias() += z * y(n, j);
      }
      const Eigen::VectorXd coef = gram.ldlt().solve(rhs);
      w.row(j) = coef.head(k).transpose();
      mu(j) = coef(k);
    }
    for (Eigen::Index n = 0; n < s; ++n) {
      const auto& cov = post.cov[static_cast<std::size_t>(n)];
      for (Eigen::Index j : observed[static_cast<std::size_t>(n)]) {
        const double resid = y(n, j) - mu(j) - w.row(j).dot(post.mean.row(n));
        sq_total += resid * resid + w.row(j) * cov * w.row(j).transpose();
        ++n_obs;
      }
    }
    sigma2 = std::max(sq_total / static_cast<double>(n_obs), sigma2_floor);

    const double ll = expected_log_likelihood(y, observed, post, mu, w, sigma2);
    result.log_likelihood.push_back(ll);
    result.iterations = iter + 1;
    if (iter > 0 && std::abs(ll - previous) <= options.tol * std::abs(previous)) {
      result.converged = true;
      break;
    }
    previous = ll;
  }

  // Completed data from the final posterior.
  const Posterior post = e_step(y, observed, mu, w, sigma2);
  Eigen::MatrixXd completed = y;
  for (Eigen::Index r = 0; r < s; ++r) {
    for (Eigen::Index c = 0; c < f; ++c) {
      if (missing(r, c)) completed(r, c) = mu(c) + w.row(c).dot(post.mean.row(r));
    }
  }
  result.completed = DataMatrix(std::move(completed), data.column_names(), data.column_origin());

  Eigen::JacobiSVD<Eigen::MatrixXd> wsvd(w, Eigen::ComputeThinU);
  ReductionModel& model = result.model;
  model.method = ReduceMethod::PPCA;
  model.mean = mu;
  model.components = wsvd.matrixU().transpose();
  orient_rows(model.components);
  model.explained_variance = wsvd.singularValues().array().square() + sigma2;
  model.noise_variance = sigma2;
  return result;
}

}  // namespace hyperspace
