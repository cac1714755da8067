#include "hyperspace/datamat.hpp"
#include "hyperspace/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace hyperspace {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::vector<std::vector<std::string>> tokenize(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (!field_started && field.empty()) {
          in_quotes = true;
          field_started = true;
        } else {
          field.push_back(ch);
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(ch);
        field_started = true;
    }
  }
  if (in_quotes) throw DataError("CSV: unterminated quoted field");
  // A trailing newline does not open a new record.
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace

ParsedCsv parse_csv_text(std::string_view text, const CsvOptions& options) {
  if (trim(text).empty()) throw DataError("CSV: empty file");
  auto records = tokenize(text);
  ParsedCsv out;
  std::size_t first = 0;
  if (options.has_header) {
    out.header = records.front();
    first = 1;
  }
  if (records.size() <= first) throw DataError("CSV: no data rows");

  const auto width = records.front().size();
  for (std::size_t i = first; i < records.size(); ++i) {
    auto& rec = records[i];
    if (rec.size() != width) {
      throw DataError("CSV: row " + std::to_string(i) + " has " + std::to_string(rec.size()) +
                      " fields, expected " + std::to_string(width));
    }
    std::vector<Cell> row;
    row.reserve(width);
    for (auto& cell : rec) {
      if (options.missing_tokens.count(std::string(trim(cell))) > 0) {
        row.emplace_back(std::nullopt);
      } else {
        row.emplace_back(std::move(cell));
      }
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

std::optional<double> parse_numeric_cell(std::string_view text) { return parse_number(text); }

DataMatrix read_csv(std::string_view text, const CsvOptions& options) {
  return table_to_matrix(parse_csv_text(text, options));
}

DataMatrix table_to_matrix(const ParsedCsv& parsed) {
  const auto rows = parsed.rows.size();
  const auto cols = parsed.rows.front().size();

  std::vector<std::string> names = parsed.header;
  if (names.empty()) {
    for (std::size_t c = 0; c < cols; ++c) names.push_back(default_column_name(c));
  }

  Eigen::MatrixXd values(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const auto& cell = parsed.rows[r][c];
      double v = std::numeric_limits<double>::quiet_NaN();
      if (cell) {
        const auto number = parse_number(*cell);
        if (!number) return tabular_to_binary(parsed.rows, names);
        v = *number;
      }
      values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return DataMatrix(std::move(values), std::move(names));
}

DataMatrix load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return read_csv(buffer.str(), options);
}

void write_csv(const DataMatrix& data, std::ostream& out) {
  const auto& names = data.column_names();
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (c > 0) out << ',';
    out << quote_if_needed(names[c]);
  }
  out << '\n';
  const auto& v = data.values();
  for (Eigen::Index r = 0; r < v.rows(); ++r) {
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
      if (c > 0) out << ',';
      if (!data.missing()(r, c)) out << format_double(v(r, c));
    }
    out << '\n';
  }
}

void save_csv(const DataMatrix& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_csv(data, out);
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

DataMatrix tabular_to_binary(const Table& table, const std::vector<std::string>& column_names) {
  if (table.empty() || table.front().empty()) throw DataError("tabular_to_binary: empty table");
  const auto width = table.front().size();
  if (column_names.size() != width) {
    throw DataError("tabular_to_binary: expected " + std::to_string(width) + " column names");
  }
  for (std::size_t r = 0; r < table.size(); ++r) {
    if (table[r].size() != width) {
      throw DataError("tabular_to_binary: row " + std::to_string(r) + " is ragged");
    }
  }

  // Per source column: value -> output column offset (std::map gives lexicographic order).
  std::vector<std::map<std::string, Eigen::Index>> levels(width);
  std::vector<std::string> names;
  std::vector<ColumnOrigin> origin;
  Eigen::Index total = 0;
  for (std::size_t c = 0; c < width; ++c) {
    for (const auto& row : table) {
      if (row[c]) levels[c].emplace(*row[c], 0);
    }
    for (auto& [value, index] : levels[c]) {
      index = total++;
      names.push_back(column_names[c] + "=" + value);
      origin.push_back({column_names[c], value});
    }
  }
  if (total == 0) throw DataError("tabular_to_binary: every cell is missing");

  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(table.size()), total);
  for (std::size_t r = 0; r < table.size(); ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      if (const auto& cell = table[r][c]) {
        values(static_cast<Eigen::Index>(r), levels[c].at(*cell)) = 1.0;
      }
    }
  }
  return DataMatrix(std::move(values), std::move(names), std::move(origin));
}

}  // namespace hyperspace
