#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hyperspace {

using MissingMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Where an expanded categorical column came from.
struct ColumnOrigin {
  std::string feature;
  std::string value;

  bool operator==(const ColumnOrigin&) const = default;
};

/// Samples-by-features matrix with an explicit missing-value mask.
///
/// Missing entries always hold NaN and every NaN is flagged missing; the
/// constructor establishes this from whichever of the two the caller gives.
/// Instances are immutable once built.
class DataMatrix {
 public:
  /// NaN entries in `values` become missing. Empty `column_names` yields
  /// "col0".."colF-1".
  explicit DataMatrix(Eigen::MatrixXd values,
                      std::vector<std::string> column_names = {},
                      std::vector<ColumnOrigin> column_origin = {});

  /// Entries flagged in `missing` are overwritten with NaN. A NaN that is not
  /// flagged is rejected.
  DataMatrix(Eigen::MatrixXd values, MissingMask missing,
             std::vector<std::string> column_names = {},
             std::vector<ColumnOrigin> column_origin = {});

  std::size_t rows() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values_.cols()); }

  const Eigen::MatrixXd& values() const { return values_; }
  const MissingMask& missing() const { return missing_; }
  const std::vector<std::string>& column_names() const { return column_names_; }
  const std::vector<ColumnOrigin>& column_origin() const { return column_origin_; }

  bool has_missing() const { return missing_.any(); }
  std::size_t missing_count() const { return static_cast<std::size_t>(missing_.count()); }
  bool is_missing(std::size_t r, std::size_t c) const {
    return missing_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }

  /// Same shape/names; used when an operation rewrites values column-wise.
  DataMatrix with_values(Eigen::MatrixXd values) const;

  /// Throws DataError naming `operation` if any entry is missing.
  void require_complete(std::string_view operation) const;

 private:
  void validate();

  Eigen::MatrixXd values_;
  MissingMask missing_;
  std::vector<std::string> column_names_;
  std::vector<ColumnOrigin> column_origin_;
};

using DataList = std::vector<DataMatrix>;

/// Default column name for index `i`.
std::string default_column_name(std::size_t i);

// ---------------------------------------------------------------------------
// CSV ingestion

struct CsvOptions {
  bool has_header = false;
  std::set<std::string> missing_tokens = {"", "NaN", "nan", "NA"};
};

/// A raw string table: each cell is either text or missing (nullopt).
using Cell = std::optional<std::string>;
using Table = std::vector<std::vector<Cell>>;

struct ParsedCsv {
  std::vector<std::string> header;  // empty when has_header is false
  Table rows;
};

/// RFC-4180-style tokenizer. Throws DataError on ragged rows or empty input.
ParsedCsv parse_csv_text(std::string_view text, const CsvOptions& options = {});

/// Parses a CSV document. Tables with any non-numeric, non-missing cell are
/// routed through tabular_to_binary.
DataMatrix read_csv(std::string_view text, const CsvOptions& options = {});
DataMatrix load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// The conversion step of read_csv on an already tokenized table.
DataMatrix table_to_matrix(const ParsedCsv& parsed);

/// Numeric value of a trimmed CSV cell, or nullopt when it is not a number.
std::optional<double> parse_numeric_cell(std::string_view text);

/// Writes a header row and shortest round-trip decimal values; missing
/// entries are written as empty cells.
void write_csv(const DataMatrix& data, std::ostream& out);
void save_csv(const DataMatrix& data, const std::filesystem::path& path);

/// One-hot expansion of a categorical table. Values are ordered
/// lexicographically within a source column; missing cells give all-zero rows
/// for that feature.
DataMatrix tabular_to_binary(const Table& table, const std::vector<std::string>& column_names);

// ---------------------------------------------------------------------------
// Transformations

enum class NormalizeMode { None, AcrossColumns, WithinColumns, WithinRows };

NormalizeMode parse_normalize_mode(std::string_view name);
std::string_view to_string(NormalizeMode mode);

/// z-scores with population standard deviation; zero-variance slices become
/// zeros and missing entries stay missing.
DataList normalize(const DataList& data, NormalizeMode mode);

/// Coordinates of missing entries in row-major order.
std::vector<std::pair<std::size_t, std::size_t>> missing_inds(const DataMatrix& data);

/// Monotone piecewise-cubic Hermite resampling of every column (Fritsch-Carlson
/// slopes). No extrapolation.
DataMatrix resample(const DataMatrix& data, const std::vector<double>& source_times,
                    const std::vector<double>& target_times);

// ---------------------------------------------------------------------------
// Helpers shared by the list-based operations

/// Vertical concatenation; requires equal column counts.
DataMatrix stack(const DataList& data);

/// Splits `stacked` back into blocks with the given row counts.
DataList split_rows(const DataMatrix& stacked, const std::vector<std::size_t>& row_counts);

std::vector<std::size_t> row_counts(const DataList& data);

}  // namespace hyperspace
