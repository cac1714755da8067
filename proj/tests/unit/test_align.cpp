#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hyperspace/align.hpp"
#include "hyperspace/error.hpp"
#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace hyperspace;
using testing::normal_matrix;
using testing::random_orthogonal;

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

// Smooth latent trajectory, S x 3.
Eigen::MatrixXd spiral(Eigen::Index s) {
  Eigen::MatrixXd out(s, 3);
  for (Eigen::Index i = 0; i < s; ++i) {
    const double t = 6.0 * M_PI * static_cast<double>(i) / static_cast<double>(s - 1);
    out.row(i) << std::cos(t), std::sin(t), t / 5.0;
  }
  return out;
}

// Flattened Pearson correlation computed with explicit loops.
double naive_correlation(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    ma += a(i);
    mb += b(i);
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    sab += (a(i) - ma) * (b(i) - mb);
    saa += (a(i) - ma) * (a(i) - ma);
    sbb += (b(i) - mb) * (b(i) - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("procrustes examples") {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd x = normal_matrix(30, 4, rng);

  SUBCASE("already aligned") {
    const ProcrustesResult r = procrustes(DataMatrix(x), DataMatrix(x));
    CHECK(r.residual < 1e-10);
    CHECK(max_abs(r.transform.rotation - Eigen::MatrixXd::Identity(4, 4)) < 1e-8);
    CHECK(r.transform.scale == doctest::Approx(1.0));
  }
  SUBCASE("rotated, scaled and shifted") {
    Eigen::MatrixXd q = random_orthogonal(4, rng);
    if (q.determinant() < 0) q.col(0) *= -1.0;
    const Eigen::RowVectorXd shift = normal_matrix(1, 4, rng) * 5.0;
    const Eigen::MatrixXd target = (2.5 * x * q).rowwise() + shift;
    const ProcrustesResult r = procrustes(DataMatrix(x), DataMatrix(target));
    CHECK(r.residual < 1e-8);
    CHECK(std::abs(r.transform.scale - 2.5) < 1e-8);
    CHECK(max_abs(r.transform.rotation - q) < 1e-8);
    CHECK(max_abs(r.transform.apply(x) - target) < 1e-8);
  }
  SUBCASE("reflected target") {
    Eigen::MatrixXd q = random_orthogonal(4, rng);
    if (q.determinant() > 0) q.col(0) *= -1.0;
    const Eigen::MatrixXd target = x * q;
    const ProcrustesResult r = procrustes(DataMatrix(x), DataMatrix(target));
    CHECK(r.residual < 1e-8);
    CHECK(r.transform.rotation.determinant() == doctest::Approx(-1.0));

    const ProcrustesResult proper =
        procrustes(DataMatrix(x), DataMatrix(target), {.allow_reflection = false});
    CHECK(proper.transform.rotation.determinant() == doctest::Approx(1.0));
    CHECK(proper.residual > 1e-3);
  }
  SUBCASE("without scaling") {
    const Eigen::MatrixXd target = 3.0 * x;
    const ProcrustesResult r = procrustes(DataMatrix(x), DataMatrix(target), {.scaling = false});
    CHECK(r.transform.scale == 1.0);
    CHECK(r.residual > 1.0);
  }
}

TEST_CASE("procrustes properties") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::MatrixXd a = normal_matrix(15, 3, rng);
    const Eigen::MatrixXd b = normal_matrix(15, 3, rng) + a;
    const ProcrustesResult r = procrustes(DataMatrix(a), DataMatrix(b));
    const Eigen::MatrixXd& t = r.transform.rotation;
    CHECK(max_abs(t.transpose() * t - Eigen::MatrixXd::Identity(3, 3)) < 1e-8);
    CHECK(r.transform.scale > 0.0);
    CHECK(r.residual <= (a - b).norm() + 1e-12);
    CHECK(r.residual == doctest::Approx((r.aligned.values() - b).norm()));

    const ProcrustesResult again = procrustes(r.aligned, DataMatrix(b));
    CHECK(max_abs(again.aligned.values() - r.aligned.values()) < 1e-10);

    // No random similarity transform does better.
    for (int probe = 0; probe < 5; ++probe) {
      const Eigen::MatrixXd q = random_orthogonal(3, rng);
      const double s = std::exp(normal_matrix(1, 1, rng)(0) * 0.3) * r.transform.scale;
      const Eigen::MatrixXd ac = a.rowwise() - a.colwise().mean();
      const Eigen::MatrixXd cand = (s * ac * q).rowwise() + b.colwise().mean();
      CHECK(r.residual <= (cand - b).norm() + 1e-12);
    }
  }
}

TEST_CASE("procrustes errors") {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd a = normal_matrix(10, 3, rng);
  CHECK_THROWS_AS(procrustes(DataMatrix(a), DataMatrix(normal_matrix(10, 4, rng))), DataError);
  CHECK_THROWS_AS(procrustes(DataMatrix(a), DataMatrix(normal_matrix(9, 3, rng))), DataError);
  CHECK_THROWS_AS(procrustes(DataMatrix(a), DataMatrix(Eigen::MatrixXd::Ones(10, 3))), DataError);
}

TEST_CASE("hyperalign examples") {
  std::mt19937_64 rng(4);
  SUBCASE("copies are left in place") {
    const Eigen::MatrixXd x = normal_matrix(20, 5, rng);
    const HyperalignResult r = hyperalign({DataMatrix(x), DataMatrix(x), DataMatrix(x)});
    REQUIRE(r.aligned.size() == 3);
    for (const auto& m : r.aligned) CHECK(max_abs(m.values() - x) < 1e-10);
  }
  SUBCASE("rotated copies of a latent trajectory") {
    Eigen::MatrixXd latent = Eigen::MatrixXd::Zero(100, 6);
    latent.leftCols(3) = spiral(100);
    DataList data;
    for (int i = 0; i < 4; ++i) {
      data.emplace_back(Eigen::MatrixXd(latent * random_orthogonal(6, rng)));
    }
    CHECK(mean_pairwise_correlation(data) < 0.5);
    const HyperalignResult r = hyperalign(data);
    CHECK(mean_pairwise_correlation(r.aligned) > 0.99);
    CHECK(r.template_matrix.rows() == 100);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(max_abs(r.transforms[i].apply(data[i].values()) - r.aligned[i].values()) < 1e-10);
    }
  }
  SUBCASE("two datasets reduce to a single procrustes fit") {
    // Without scaling both outputs share the template frame, so their
    // distance is the rigid Procrustes residual of one onto the other.
    const Eigen::MatrixXd a = normal_matrix(25, 3, rng);
    const Eigen::MatrixXd b = a * random_orthogonal(3, rng) + normal_matrix(25, 3, rng, 0.3);
    const ProcrustesOptions rigid{.scaling = false};
    const HyperalignResult r = hyperalign({DataMatrix(a), DataMatrix(b)}, 2, rigid);
    const double pair = (r.aligned[0].values() - r.aligned[1].values()).norm();
    const double direct = procrustes(DataMatrix(b), DataMatrix(a), rigid).residual;
    CHECK(std::abs(pair - direct) < 1e-8);
  }
}

TEST_CASE("hyperalign ordering does not change the similarity") {
  std::mt19937_64 rng(5);
  Eigen::MatrixXd latent = Eigen::MatrixXd::Zero(80, 5);
  latent.leftCols(3) = spiral(80);
  DataList data;
  for (int i = 0; i < 4; ++i) {
    data.emplace_back(Eigen::MatrixXd(latent * random_orthogonal(5, rng) + normal_matrix(80, 5, rng, 0.01)));
  }
  const double forward = mean_pairwise_correlation(hyperalign(data).aligned);
  DataList reversed(data.rbegin(), data.rend());
  const double backward = mean_pairwise_correlation(hyperalign(reversed).aligned);
  CHECK(std::abs(forward - backward) < 1e-6);
}

TEST_CASE("hyperalign errors") {
  std::mt19937_64 rng(6);
  const DataMatrix a(normal_matrix(10, 3, rng));
  CHECK_THROWS_AS(hyperalign({a}), UsageError);
  CHECK_THROWS_AS(hyperalign({a, DataMatrix(normal_matrix(10, 4, rng))}), DataError);
  CHECK_THROWS_AS(hyperalign({a, DataMatrix(normal_matrix(11, 3, rng))}), DataError);
  CHECK_THROWS_AS(hyperalign({a, a}, 0), UsageError);
}

TEST_CASE("SRM recovers a shared response") {
  std::mt19937_64 rng(7);
  const Eigen::Index s = 120;
  const int k = 3;
  // Centered orthogonal columns with distinct variances: the principal axes
  // of the shared response are exactly its columns.
  const Eigen::MatrixXd raw = normal_matrix(s, k, rng);
  Eigen::MatrixXd shared0 = Eigen::HouseholderQR<Eigen::MatrixXd>(raw.rowwise() - raw.colwise().mean())
                                .householderQ() *
                            Eigen::MatrixXd::Identity(s, k);
  shared0.col(0) *= 3.0;
  shared0.col(1) *= 2.0;
  DataList data;
  for (Eigen::Index f : {6, 8, 5}) {
    const Eigen::MatrixXd w = random_orthogonal(f, rng).leftCols(k);
    data.emplace_back(Eigen::MatrixXd(shared0 * w.transpose()));
  }
  const SrmResult r = srm(data, k, 20, 11);
  REQUIRE(r.model.shared.rows() == s);
  REQUIRE(r.model.shared.cols() == k);

  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    double worst = 1.0;
    for (int c = 0; c < k; ++c) {
      worst = std::min(worst, std::abs(testing::pearson(shared0.col(c), r.model.shared.col(perm[c]))));
    }
    best = std::max(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  CHECK(best > 0.99);

  for (std::size_t i = 0; i < data.size(); ++i) {
    const Eigen::MatrixXd& w = r.model.bases[i];
    CHECK(max_abs(w.transpose() * w - Eigen::MatrixXd::Identity(k, k)) < 1e-8);
    CHECK(max_abs(r.projected[i].values() - data[i].values() * w) < 1e-10);
  }
}

TEST_CASE("SRM objective is non-increasing and reproducible") {
  std::mt19937_64 rng(8);
  const Eigen::MatrixXd base = normal_matrix(50, 4, rng);
  DataList data;
  for (Eigen::Index f : {7, 9}) {
    data.emplace_back(Eigen::MatrixXd(base * normal_matrix(4, f, rng) + normal_matrix(50, f, rng, 0.5)));
  }
  const SrmResult a = srm(data, 3, 10, 5);
  REQUIRE(a.model.objective.size() == 11);
  for (std::size_t i = 1; i < a.model.objective.size(); ++i) {
    CHECK(a.model.objective[i] <= a.model.objective[i - 1] * (1 + 1e-12));
  }
  CHECK(srm_objective(data, a.model) == doctest::Approx(a.model.objective.back()).epsilon(1e-9));

  const SrmResult b = srm(data, 3, 10, 5);
  CHECK(a.model.shared == b.model.shared);
  for (std::size_t i = 0; i < 2; ++i) CHECK(a.model.bases[i] == b.model.bases[i]);
}

TEST_CASE("SRM errors") {
  std::mt19937_64 rng(9);
  const DataMatrix a(normal_matrix(10, 3, rng));
  const DataMatrix b(normal_matrix(10, 5, rng));
  CHECK_THROWS_AS(srm({a, b}, 4), UsageError);
  CHECK_THROWS_AS(srm({a, b}, 0), UsageError);
  CHECK_THROWS_AS(srm({a}, 2), UsageError);
  CHECK_THROWS_AS(srm({a, DataMatrix(normal_matrix(9, 3, rng))}, 2), DataError);
}

TEST_CASE("matrix correlation helpers") {
  std::mt19937_64 rng(10);
  const Eigen::MatrixXd a = normal_matrix(8, 3, rng);
  const Eigen::MatrixXd b = normal_matrix(8, 3, rng);
  const Eigen::MatrixXd c = normal_matrix(8, 3, rng);
  CHECK(matrix_correlation(a, b) == doctest::Approx(naive_correlation(a, b)).epsilon(1e-12));
  const double mean = (naive_correlation(a, b) + naive_correlation(a, c) + naive_correlation(b, c)) / 3.0;
  CHECK(mean_pairwise_correlation({DataMatrix(a), DataMatrix(b), DataMatrix(c)}) ==
        doctest::Approx(mean).epsilon(1e-12));
}
