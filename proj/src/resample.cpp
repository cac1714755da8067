#include "hyperspace/datamat.hpp"
#include "hyperspace/error.hpp"

#include <algorithm>
#include <cmath>

namespace hyperspace {

namespace {

// Fritsch-Carlson slopes: centered secants, zeroed at local extrema, then
// scaled into the monotonicity region alpha^2 + beta^2 <= 9.
std::vector<double> monotone_slopes(const std::vector<double>& t, const Eigen::VectorXd& y) {
  const std::size_t n = t.size();
  std::vector<double> secant(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    secant[k] = (y(static_cast<Eigen::Index>(k + 1)) - y(static_cast<Eigen::Index>(k))) /
                (t[k + 1] - t[k]);
  }
  std::vector<double> m(n);
  m.front() = secant.front();
  m.back() = secant.back();
  for (std::size_t k = 1; k + 1 < n; ++k) {
    m[k] = secant[k - 1] * secant[k] <= 0.0 ? 0.0 : 0.5 * (secant[k - 1] + secant[k]);
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (secant[k] == 0.0) {
      m[k] = 0.0;
      m[k + 1] = 0.0;
      continue;
    }
    const double alpha = m[k] / secant[k];
    const double beta = m[k + 1] / secant[k];
    const double r2 = alpha * alpha + beta * beta;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      m[k] = tau * alpha * secant[k];
      m[k + 1] = tau * beta * secant[k];
    }
  }
  return m;
}

}  // namespace

DataMatrix resample(const DataMatrix& data, const std::vector<double>& source_times,
                    const std::vector<double>& target_times) {
  if (data.has_missing()) {
    throw DataError("resample: data has missing entries; impute them first (e.g. with PPCA)");
  }
  if (source_times.size() != data.rows()) {
    throw UsageError("resample: expected " + std::to_string(data.rows()) + " source times");
  }
  if (target_times.empty()) throw UsageError("resample: no target times");
  for (std::size_t i = 1; i < source_times.size(); ++i) {
    if (!(source_times[i] > source_times[i - 1])) {
      throw UsageError("resample: source times must be strictly increasing");
    }
  }
  const double lo = source_times.front();
  const double hi = source_times.back();
  for (double t : target_times) {
    if (!(t >= lo && t <= hi)) {
      throw UsageError("resample: target time " + std::to_string(t) + " outside [" +
                       std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
  }

  const auto& y = data.values();
  const auto n_out = static_cast<Eigen::Index>(target_times.size());
  Eigen::MatrixXd out(n_out, y.cols());

  if (source_times.size() == 1) {
    for (Eigen::Index r = 0; r < n_out; ++r) out.row(r) = y.row(0);
    return data.with_values(std::move(out));
  }

  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    const Eigen::VectorXd column = y.col(c);
    const auto slopes = monotone_slopes(source_times, column);
    for (Eigen::Index r = 0; r < n_out; ++r) {
      const double t = target_times[static_cast<std::size_t>(r)];
      auto it = std::upper_bound(source_times.begin(), source_times.end(), t);
      auto k = static_cast<std::size_t>(std::distance(source_times.begin(), it));
      k = std::clamp<std::size_t>(k, 1, source_times.size() - 1) - 1;
      if (t == source_times[k]) {
        out(r, c) = column(static_cast<Eigen::Index>(k));
        continue;
      }
      const double h = source_times[k + 1] - source_times[k];
      const double s = (t - source_times[k]) / h;
      const double s2 = s * s;
      const double s3 = s2 * s;
      const double h00 = 2 * s3 - 3 * s2 + 1;
      const double h10 = s3 - 2 * s2 + s;
      const double h01 = -2 * s3 + 3 * s2;
      const double h11 = s3 - s2;
      out(r, c) = h00 * column(static_cast<Eigen::Index>(k)) + h10 * h * slopes[k] +
                  h01 * column(static_cast<Eigen::Index>(k + 1)) + h11 * h * slopes[k + 1];
    }
  }
  return data.with_values(std::move(out));
}

}  // namespace hyperspace
