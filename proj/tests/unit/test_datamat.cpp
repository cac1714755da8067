#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hyperspace/datamat.hpp"
#include "hyperspace/error.hpp"
#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>

using namespace hyperspace;

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

// One-hot reference built with a plain map of distinct values.
Eigen::MatrixXd one_hot_oracle(const Table& table) {
  std::vector<std::map<std::string, int>> levels(table.front().size());
  for (const auto& row : table) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c]) levels[c][*row[c]] = 0;
    }
  }
  int width = 0;
  for (auto& lv : levels) {
    for (auto& [_, idx] : lv) idx = width++;
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(table.size()), width);
  for (std::size_t r = 0; r < table.size(); ++r) {
    for (std::size_t c = 0; c < table[r].size(); ++c) {
      if (table[r][c]) out(static_cast<Eigen::Index>(r), levels[c].at(*table[r][c])) = 1.0;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("DataMatrix keeps NaN and mask identical") {
  Eigen::MatrixXd v(2, 2);
  v << 1, kNaN, 3, 4;
  const DataMatrix m(v);
  CHECK(m.is_missing(0, 1));
  CHECK(m.missing_count() == 1);
  CHECK(m.column_names() == std::vector<std::string>{"col0", "col1"});

  MissingMask mask = MissingMask::Constant(2, 2, false);
  mask(1, 0) = true;
  const DataMatrix masked(Eigen::MatrixXd::Ones(2, 2), mask);
  CHECK(std::isnan(masked.values()(1, 0)));

  CHECK_THROWS_AS(DataMatrix(v, MissingMask::Constant(2, 2, false)), DataError);
  CHECK_THROWS_AS(DataMatrix(Eigen::MatrixXd::Ones(2, 2), std::vector<std::string>{"a", "a"}), DataError);
  CHECK_THROWS_AS(DataMatrix(Eigen::MatrixXd(0, 2)), DataError);
}

TEST_CASE("read_csv parses numbers and missing cells") {
  const DataMatrix m = read_csv("1,2\n3,\n5,6");
  REQUIRE(m.rows() == 3);
  REQUIRE(m.cols() == 2);
  CHECK(m.values()(0, 0) == 1.0);
  CHECK(m.values()(2, 1) == 6.0);
  CHECK(m.is_missing(1, 1));
  CHECK(m.missing_count() == 1);

  CsvOptions header;
  header.has_header = true;
  CHECK(read_csv("a,b\n1,2\n", header).column_names() == std::vector<std::string>{"a", "b"});

  const DataMatrix tokens = read_csv("NA,nan\nNaN,+2.5\n");
  CHECK(tokens.missing_count() == 3);
  CHECK(tokens.values()(1, 1) == 2.5);
}

TEST_CASE("read_csv routes text columns through tabular_to_binary") {
  CsvOptions header;
  header.has_header = true;
  const DataMatrix m = read_csv("x\np\ne\n", header);
  CHECK(m.cols() == 2);
  CHECK(m.column_names() == std::vector<std::string>{"x=e", "x=p"});
  CHECK(m.column_origin().at(1) == ColumnOrigin{"x", "p"});
  CHECK(m.values()(0, 1) == 1.0);
}

TEST_CASE("CSV tokenizer handles quotes and errors") {
  const ParsedCsv p = parse_csv_text("\"a,b\",\"say \"\"hi\"\"\"\r\n1,2\r\n", {true, {""}});
  CHECK(p.header == std::vector<std::string>{"a,b", "say \"hi\""});
  CHECK(p.rows.size() == 1);
  CHECK_THROWS_AS(read_csv("1,2\n3\n"), DataError);
  CHECK_THROWS_AS(read_csv(""), DataError);
}

TEST_CASE("CSV round trip reproduces numeric content") {
  std::mt19937_64 rng(7);
  Eigen::MatrixXd v = testing::normal_matrix(20, 4, rng, 1e3);
  v(3, 2) = kNaN;
  v(0, 0) = 1e-300;
  const DataMatrix m(v, std::vector<std::string>{"a", "b", "c", "d"});
  std::ostringstream out;
  write_csv(m, out);
  CsvOptions header;
  header.has_header = true;
  const DataMatrix back = read_csv(out.str(), header);
  CHECK(back.column_names() == m.column_names());
  CHECK((back.missing() == m.missing()).all());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::isnan(v(i))) continue;
    CHECK(std::abs(back.values()(i) - v(i)) <= 1e-12 * std::abs(v(i)));
  }
}

TEST_CASE("tabular_to_binary matches a one-hot oracle") {
  SUBCASE("single column") {
    const Table t = {{"a"}, {"b"}, {"a"}};
    const DataMatrix m = tabular_to_binary(t, {"col0"});
    Eigen::MatrixXd expected(3, 2);
    expected << 1, 0, 0, 1, 1, 0;
    CHECK(m.values() == expected);
    CHECK(m.column_names() == std::vector<std::string>{"col0=a", "col0=b"});
  }
  SUBCASE("two columns give row sums of 2") {
    const Table t = {{"p", "x"}, {"e", "x"}};
    const DataMatrix m = tabular_to_binary(t, {"cap", "odor"});
    CHECK(m.cols() == 3);
    CHECK(m.values() == one_hot_oracle(t));
    CHECK((m.values().rowwise().sum().array() == 2.0).all());
  }
  SUBCASE("single distinct value") {
    const DataMatrix m = tabular_to_binary({{"z"}, {"z"}}, {"c"});
    CHECK(m.cols() == 1);
    CHECK((m.values().array() == 1.0).all());
  }
  SUBCASE("random tables with missing cells") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> level(0, 4);
    for (int trial = 0; trial < 20; ++trial) {
      Table t(30, std::vector<Cell>(3));
      for (auto& row : t) {
        for (auto& cell : row) {
          const int v = level(rng);
          if (v == 0) continue;
          cell = std::string(1, static_cast<char>('a' + v));
        }
      }
      const DataMatrix m = tabular_to_binary(t, {"f0", "f1", "f2"});
      CHECK(m.values() == one_hot_oracle(t));
      CHECK_FALSE(m.has_missing());
      CHECK(((m.values().array() == 0.0) || (m.values().array() == 1.0)).all());
      for (std::size_t c = 0; c < 3; ++c) {
        Eigen::VectorXd sums = Eigen::VectorXd::Zero(30);
        for (std::size_t j = 0; j < m.cols(); ++j) {
          if (m.column_origin()[j].feature == "f" + std::to_string(c)) sums += m.values().col(static_cast<Eigen::Index>(j));
        }
        for (Eigen::Index r = 0; r < 30; ++r) CHECK(sums(r) == (t[static_cast<std::size_t>(r)][c] ? 1.0 : 0.0));
      }
    }
  }
  CHECK_THROWS_AS(tabular_to_binary({}, {}), DataError);
}

TEST_CASE("normalize examples") {
  Eigen::MatrixXd a(2, 1);
  a << 1, 3;
  const auto within = normalize({DataMatrix(a)}, NormalizeMode::WithinColumns);
  CHECK(within[0].values()(0, 0) == doctest::Approx(-1.0));
  CHECK(within[0].values()(1, 0) == doctest::Approx(1.0));

  const auto constant = normalize({DataMatrix(Eigen::MatrixXd::Constant(2, 1, 5.0))}, NormalizeMode::WithinColumns);
  CHECK((constant[0].values().array() == 0.0).all());

  const auto pooled = normalize({DataMatrix(Eigen::MatrixXd::Zero(1, 1)), DataMatrix(Eigen::MatrixXd::Constant(1, 1, 2.0))},
                                NormalizeMode::AcrossColumns);
  CHECK(pooled[0].values()(0, 0) == doctest::Approx(-1.0));
  CHECK(pooled[1].values()(0, 0) == doctest::Approx(1.0));

  const auto none = normalize({DataMatrix(a)}, NormalizeMode::None);
  CHECK(none[0].values() == a);
}

TEST_CASE("normalize property: within-column moments") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd v = testing::normal_matrix(25, 4, rng, 5.0).array() + 7.0;
    v(2, 1) = kNaN;
    v.col(3).setConstant(1.5);
    const auto out = normalize({DataMatrix(v)}, NormalizeMode::WithinColumns)[0];
    CHECK(out.is_missing(2, 1));
    for (Eigen::Index c = 0; c < 4; ++c) {
      double sum = 0, sq = 0;
      int n = 0;
      for (Eigen::Index r = 0; r < 25; ++r) {
        if (out.is_missing(static_cast<std::size_t>(r), static_cast<std::size_t>(c))) continue;
        sum += out.values()(r, c);
        ++n;
      }
      const double mean = sum / n;
      for (Eigen::Index r = 0; r < 25; ++r) {
        if (!out.is_missing(static_cast<std::size_t>(r), static_cast<std::size_t>(c))) sq += std::pow(out.values()(r, c) - mean, 2);
      }
      CHECK(std::abs(mean) < 1e-10);
      if (c == 3) {
        CHECK(sq == 0.0);
      } else {
        CHECK(std::abs(std::sqrt(sq / n) - 1.0) < 1e-10);
      }
    }
  }
}

TEST_CASE("normalize within rows") {
  Eigen::MatrixXd v(2, 3);
  v << 1, 2, 3, 4, 4, 4;
  const auto out = normalize({DataMatrix(v)}, NormalizeMode::WithinRows)[0];
  const double s = std::sqrt(2.0 / 3.0);
  CHECK(out.values()(0, 0) == doctest::Approx(-1.0 / s));
  CHECK(out.values()(0, 2) == doctest::Approx(1.0 / s));
  CHECK((out.values().row(1).array() == 0.0).all());
  CHECK_THROWS_AS(parse_normalize_mode("sideways"), UsageError);
}

TEST_CASE("missing_inds") {
  Eigen::MatrixXd v(2, 2);
  v << 1, kNaN, kNaN, 4;
  using Inds = std::vector<std::pair<std::size_t, std::size_t>>;
  CHECK(missing_inds(DataMatrix(v)) == Inds{{0, 1}, {1, 0}});
  CHECK(missing_inds(DataMatrix(Eigen::MatrixXd::Ones(3, 3))).empty());
  CHECK(missing_inds(DataMatrix(Eigen::MatrixXd::Constant(1, 2, kNaN))) == Inds{{0, 0}, {0, 1}});
}

TEST_CASE("resample examples") {
  const std::vector<double> src = {0.0, 0.5, 2.0, 3.0, 7.0};
  Eigen::MatrixXd ramp(5, 1);
  for (int i = 0; i < 5; ++i) ramp(i, 0) = src[static_cast<std::size_t>(i)];
  const std::vector<double> targets = {0.0, 0.25, 1.0, 2.5, 6.9, 7.0};
  const DataMatrix out = resample(DataMatrix(ramp), src, targets);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    CHECK(out.values()(static_cast<Eigen::Index>(i), 0) == doctest::Approx(targets[i]).epsilon(1e-12));
  }

  std::mt19937_64 rng(5);
  const Eigen::MatrixXd v = testing::normal_matrix(5, 3, rng);
  CHECK(resample(DataMatrix(v), src, src).values() == v);

  CHECK_THROWS_AS(resample(DataMatrix(v), src, {7.5}), UsageError);
  CHECK_THROWS_AS(resample(DataMatrix(v), {0, 1, 1, 2, 3}, {0.5}), UsageError);
  Eigen::MatrixXd holes = v;
  holes(1, 1) = kNaN;
  CHECK_THROWS_AS(resample(DataMatrix(holes), src, {0.5}), DataError);
}

TEST_CASE("resample property: monotone input stays monotone and within range") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> step(0.0, 3.0);
  std::uniform_real_distribution<double> dt(0.1, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 4 + trial % 10;
    std::vector<double> t(static_cast<std::size_t>(n));
    Eigen::MatrixXd v(n, 2);
    double acc_t = 0, up = 0, down = 0;
    for (int i = 0; i < n; ++i) {
      acc_t += dt(rng);
      t[static_cast<std::size_t>(i)] = acc_t;
      up += (i % 3 == 0) ? 0.0 : step(rng);  // flat stretches included
      down -= step(rng);
      v(i, 0) = up;
      v(i, 1) = down;
    }
    std::vector<double> targets;
    for (int k = 0; k < 200; ++k) targets.push_back(t.front() + (t.back() - t.front()) * k / 200.0);
    targets.push_back(t.back());
    const Eigen::MatrixXd out = resample(DataMatrix(v), t, targets).values();
    for (Eigen::Index r = 1; r < out.rows(); ++r) {
      CHECK(out(r, 0) >= out(r - 1, 0) - 1e-12);
      CHECK(out(r, 1) <= out(r - 1, 1) + 1e-12);
    }
    CHECK(out.col(0).minCoeff() >= v.col(0).minCoeff() - 1e-12);
    CHECK(out.col(0).maxCoeff() <= v.col(0).maxCoeff() + 1e-12);
  }
}

TEST_CASE("stack and split") {
  const DataList list = {DataMatrix(Eigen::MatrixXd::Ones(2, 3)), DataMatrix(Eigen::MatrixXd::Zero(4, 3))};
  const DataMatrix s = stack(list);
  CHECK(s.rows() == 6);
  const DataList back = split_rows(s, row_counts(list));
  CHECK(back[1].values() == list[1].values());
  CHECK_THROWS_AS(stack({DataMatrix(Eigen::MatrixXd::Ones(2, 3)), DataMatrix(Eigen::MatrixXd::Ones(2, 2))}), DataError);
}
