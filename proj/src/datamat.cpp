#include "hyperspace/datamat.hpp"

#include "hyperspace/error.hpp"

#include <cmath>
#include <limits>
#include <unordered_set>

namespace hyperspace {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Relative threshold below which a slice is treated as constant.
bool is_zero_spread(double stddev, double mean) {
  return !(stddev > 1e-14 * std::max(1.0, std::abs(mean)));
}

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t count = 0;
};

template <typename Visit>
Moments observed_moments(Visit&& visit) {
  Moments m;
  double sum = 0.0;
  visit([&](double v) {
    sum += v;
    ++m.count;
  });
  if (m.count == 0) return m;
  m.mean = sum / static_cast<double>(m.count);
  double ss = 0.0;
  visit([&](double v) { ss += (v - m.mean) * (v - m.mean); });
  m.stddev = std::sqrt(ss / static_cast<double>(m.count));
  return m;
}

double zscore(double v, const Moments& m) {
  if (std::isnan(v)) return v;
  if (is_zero_spread(m.stddev, m.mean)) return 0.0;
  return (v - m.mean) / m.stddev;
}

}  // namespace

std::string default_column_name(std::size_t i) { return "col" + std::to_string(i); }

DataMatrix::DataMatrix(Eigen::MatrixXd values, std::vector<std::string> column_names,
                       std::vector<ColumnOrigin> column_origin)
    : values_(std::move(values)),
      column_names_(std::move(column_names)),
      column_origin_(std::move(column_origin)) {
  missing_ = values_.array().isNaN();
  validate();
}

DataMatrix::DataMatrix(Eigen::MatrixXd values, MissingMask missing,
                       std::vector<std::string> column_names,
                       std::vector<ColumnOrigin> column_origin)
    : values_(std::move(values)),
      missing_(std::move(missing)),
      column_names_(std::move(column_names)),
      column_origin_(std::move(column_origin)) {
  if (missing_.rows() != values_.rows() || missing_.cols() != values_.cols()) {
    throw DataError("missing mask shape does not match values");
  }
  for (Eigen::Index c = 0; c < values_.cols(); ++c) {
    for (Eigen::Index r = 0; r < values_.rows(); ++r) {
      if (missing_(r, c)) {
        values_(r, c) = kNaN;
      } else if (std::isnan(values_(r, c))) {
        throw DataError("NaN at (" + std::to_string(r) + ", " + std::to_string(c) +
                        ") is not flagged missing");
      }
    }
  }
  validate();
}

void DataMatrix::validate() {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw DataError("data matrix must have at least one row and one column");
  }
  const auto f = cols();
  if (column_names_.empty()) {
    column_names_.reserve(f);
    for (std::size_t i = 0; i < f; ++i) column_names_.push_back(default_column_name(i));
  }
  if (column_names_.size() != f) {
    throw DataError("expected " + std::to_string(f) + " column names, got " +
                    std::to_string(column_names_.size()));
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : column_names_) {
    if (!seen.insert(name).second) throw DataError("duplicate column name '" + name + "'");
  }
  if (!column_origin_.empty() && column_origin_.size() != f) {
    throw DataError("column_origin must have one entry per column");
  }
}

DataMatrix DataMatrix::with_values(Eigen::MatrixXd values) const {
  if (values.cols() != values_.cols()) {
    return DataMatrix(std::move(values));
  }
  return DataMatrix(std::move(values), column_names_, column_origin_);
}

void DataMatrix::require_complete(std::string_view operation) const {
  if (has_missing()) {
    throw DataError(std::string(operation) + ": data has " + std::to_string(missing_count()) +
                    " missing entries; impute them first (e.g. with PPCA)");
  }
}

NormalizeMode parse_normalize_mode(std::string_view name) {
  if (name == "none") return NormalizeMode::None;
  if (name == "across" || name == "across_columns") return NormalizeMode::AcrossColumns;
  if (name == "within" || name == "within_columns") return NormalizeMode::WithinColumns;
  if (name == "rows" || name == "within_rows") return NormalizeMode::WithinRows;
  throw UsageError("unknown normalize mode '" + std::string(name) + "'");
}

std::string_view to_string(NormalizeMode mode) {
  switch (mode) {
    case NormalizeMode::None: return "none";
    case NormalizeMode::AcrossColumns: return "across_columns";
    case NormalizeMode::WithinColumns: return "within_columns";
    case NormalizeMode::WithinRows: return "within_rows";
  }
  return "none";
}

DataList normalize(const DataList& data, NormalizeMode mode) {
  if (data.empty()) throw DataError("normalize: empty data list");
  DataList out;
  out.reserve(data.size());

  switch (mode) {
    case NormalizeMode::None:
      return data;

    case NormalizeMode::AcrossColumns: {
      const auto f = data.front().cols();
      for (const auto& m : data) {
        if (m.cols() != f) throw DataError("normalize: matrices have different column counts");
      }
      std::vector<Moments> moments(f);
      for (std::size_t c = 0; c < f; ++c) {
        const auto col = static_cast<Eigen::Index>(c);
        moments[c] = observed_moments([&](auto&& emit) {
          for (const auto& m : data) {
            for (Eigen::Index r = 0; r < m.values().rows(); ++r) {
              if (!m.missing()(r, col)) emit(m.values()(r, col));
            }
          }
        });
      }
      for (const auto& m : data) {
        Eigen::MatrixXd v = m.values();
        for (Eigen::Index c = 0; c < v.cols(); ++c) {
          for (Eigen::Index r = 0; r < v.rows(); ++r) v(r, c) = zscore(v(r, c), moments[c]);
        }
        out.push_back(m.with_values(std::move(v)));
      }
      return out;
    }

    case NormalizeMode::WithinColumns:
    case NormalizeMode::WithinRows: {
      const bool by_column = mode == NormalizeMode::WithinColumns;
      for (const auto& m : data) {
        Eigen::MatrixXd v = m.values();
        const auto& mask = m.missing();
        const Eigen::Index slices = by_column ? v.cols() : v.rows();
        const Eigen::Index length = by_column ? v.rows() : v.cols();
        for (Eigen::Index s = 0; s < slices; ++s) {
          auto at = [&](Eigen::Index i) -> double& { return by_column ? v(i, s) : v(s, i); };
          auto masked = [&](Eigen::Index i) { return by_column ? mask(i, s) : mask(s, i); };
          const Moments mo = observed_moments([&](auto&& emit) {
            for (Eigen::Index i = 0; i < length; ++i) {
              if (!masked(i)) emit(at(i));
            }
          });
          for (Eigen::Index i = 0; i < length; ++i) at(i) = zscore(at(i), mo);
        }
        out.push_back(m.with_values(std::move(v)));
      }
      return out;
    }
  }
  return data;
}

std::vector<std::pair<std::size_t, std::size_t>> missing_inds(const DataMatrix& data) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t c = 0; c < data.cols(); ++c) {
      if (data.is_missing(r, c)) out.emplace_back(r, c);
    }
  }
  return out;
}

DataMatrix stack(const DataList& data) {
  if (data.empty()) throw DataError("empty data list");
  if (data.size() == 1) return data.front();
  const auto f = data.front().cols();
  Eigen::Index total = 0;
  for (const auto& m : data) {
    if (m.cols() != f) {
      throw DataError("all matrices must have the same number of features (" +
                      std::to_string(f) + " vs " + std::to_string(m.cols()) + ")");
    }
    total += static_cast<Eigen::Index>(m.rows());
  }
  Eigen::MatrixXd values(total, static_cast<Eigen::Index>(f));
  Eigen::Index offset = 0;
  for (const auto& m : data) {
    values.middleRows(offset, m.values().rows()) = m.values();
    offset += m.values().rows();
  }
  return DataMatrix(std::move(values), data.front().column_names(), data.front().column_origin());
}

DataList split_rows(const DataMatrix& stacked, const std::vector<std::size_t>& counts) {
  DataList out;
  out.reserve(counts.size());
  Eigen::Index offset = 0;
  for (auto n : counts) {
    const auto rows = static_cast<Eigen::Index>(n);
    if (offset + rows > stacked.values().rows()) throw DataError("split_rows: row counts exceed matrix");
    out.push_back(stacked.with_values(stacked.values().middleRows(offset, rows)));
    offset += rows;
  }
  if (offset != stacked.values().rows()) throw DataError("split_rows: row counts do not cover matrix");
  return out;
}

std::vector<std::size_t> row_counts(const DataList& data) {
  std::vector<std::size_t> out;
  out.reserve(data.size());
  for (const auto& m : data) out.push_back(m.rows());
  return out;
}

}  // namespace hyperspace
