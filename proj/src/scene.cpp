#include "hyperspace/scene.hpp"

#include "hyperspace/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>

namespace hyperspace {

namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string one_decimal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  std::string s = buf;
  if (s == "-0.0") s = "0.0";
  return s;
}

bool has_string(const GroupLabels& group) {
  for (const auto& block : group) {
    for (const auto& v : block) {
      if (std::holds_alternative<std::string>(v)) return true;
    }
  }
  return false;
}

std::string category_name(const LabelValue& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  if (const auto* d = std::get_if<double>(&v)) return format_number(*d);
  return "None";
}

void check_lengths(const std::vector<std::size_t>& row_counts, std::size_t blocks,
                   const std::function<std::size_t(std::size_t)>& block_size, const char* what) {
  if (blocks != row_counts.size()) {
    throw UsageError(std::string(what) + " cover " + std::to_string(blocks) + " datasets but " +
                     std::to_string(row_counts.size()) + " were given");
  }
  for (std::size_t i = 0; i < blocks; ++i) {
    if (block_size(i) != row_counts[i]) {
      throw UsageError(std::string(what) + " for dataset " + std::to_string(i) + " have " +
                       std::to_string(block_size(i)) + " entries but the dataset has " +
                       std::to_string(row_counts[i]) + " rows");
    }
  }
}

// Lifts reduced or raw coordinates to exactly `dim` columns.
Eigen::MatrixXd to_scene_coords(const Eigen::MatrixXd& x, int dim) {
  if (x.cols() == dim) return x;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.rows(), dim);
  if (x.cols() == 1 && dim == 2) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) out(i, 0) = static_cast<double>(i);
    out.col(1) = x.col(0);
    return out;
  }
  out.leftCols(x.cols()) = x;
  return out;
}

}  // namespace

bool Series::operator==(const Series& other) const {
  return name == other.name && style == other.style && imputed == other.imputed &&
         points.rows() == other.points.rows() && points.cols() == other.points.cols() &&
         points == other.points;
}

bool Label::operator==(const Label& other) const {
  return series == other.series && point == other.point && text == other.text &&
         anchor.size() == other.anchor.size() && anchor == other.anchor;
}

std::size_t Scene::point_count() const {
  std::size_t n = 0;
  for (const auto& s : series) n += static_cast<std::size_t>(s.points.rows());
  return n;
}

void Scene::validate() const {
  if (dimension != 2 && dimension != 3) {
    throw DataError("scene dimension must be 2 or 3, got " + std::to_string(dimension));
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const std::string where = "series " + std::to_string(i);
    if (s.points.cols() != dimension) {
      throw DataError(where + " has " + std::to_string(s.points.cols()) + " coordinate columns, scene is " +
                      std::to_string(dimension) + "D");
    }
    if (!s.points.allFinite()) throw DataError(where + " has non-finite coordinates");
    if (s.style.marker == Marker::None && s.style.line == LineStyle::None) {
      throw DataError(where + " has neither marker nor line");
    }
    if (!(s.style.opacity >= 0.0 && s.style.opacity <= 1.0)) throw DataError(where + " opacity outside [0, 1]");
    for (double c : {s.style.color.r, s.style.color.g, s.style.color.b}) {
      if (!(c >= 0.0 && c <= 1.0)) throw DataError(where + " colour component outside [0, 1]");
    }
    for (std::size_t k = 0; k < s.imputed.size(); ++k) {
      if (s.imputed[k] >= static_cast<std::size_t>(s.points.rows()) || (k > 0 && s.imputed[k] <= s.imputed[k - 1])) {
        throw DataError(where + " has invalid imputed indices");
      }
    }
  }
  for (const auto& l : labels) {
    if (l.series >= series.size() || l.point >= static_cast<std::size_t>(series[l.series].points.rows())) {
      throw DataError("label '" + l.text + "' refers to a point that does not exist");
    }
    if (l.anchor.size() != dimension) throw DataError("label '" + l.text + "' anchor has the wrong dimension");
  }
  if (animation) {
    if (!(animation->duration_s > 0.0)) throw DataError("animation duration must be positive");
    if (!(animation->frame_rate > 0.0)) throw DataError("animation frame rate must be positive");
    if (!(animation->tail_duration_s >= 0.0)) throw DataError("animation tail duration must be non-negative");
    if (!std::isfinite(animation->rotations) || !std::isfinite(animation->zoom)) {
      throw DataError("animation rotations and zoom must be finite");
    }
  }
  if (!std::isfinite(camera.azimuth) || !std::isfinite(camera.elevation) || !std::isfinite(camera.zoom)) {
    throw DataError("camera parameters must be finite");
  }
}

int value_bin(double value, double lo, double hi, int n_bins) {
  if (!(hi > lo)) return 0;
  const double pos = (value - lo) / (hi - lo) * n_bins;
  return std::clamp(static_cast<int>(std::floor(pos)), 0, n_bins - 1);
}

ColorAssignment assign_colors(const std::vector<std::size_t>& row_counts, const GroupLabels& group,
                              const Palette& palette, int n_bins) {
  if (n_bins < 1) throw UsageError("n_bins must be at least 1");
  check_lengths(row_counts, group.size(), [&](std::size_t i) { return group[i].size(); }, "group labels");

  ColorAssignment out;
  out.numeric = !has_string(group);
  out.point_colors.resize(group.size());
  out.point_series.resize(group.size());
  for (std::size_t m = 0; m < group.size(); ++m) {
    out.point_colors[m].resize(group[m].size());
    out.point_series[m].resize(group[m].size());
  }

  if (!out.numeric) {
    std::map<std::string, std::size_t> index;
    std::vector<std::string> order;
    std::optional<std::size_t> none_series;
    for (const auto& block : group) {
      for (const auto& v : block) {
        if (std::holds_alternative<std::monostate>(v)) continue;
        auto name = category_name(v);
        if (index.emplace(name, order.size()).second) order.push_back(std::move(name));
      }
    }
    for (std::size_t i = 0; i < order.size(); ++i) {
      out.series.push_back({order[i], palette.category(i, order.size()), {}});
    }
    for (std::size_t m = 0; m < group.size(); ++m) {
      for (std::size_t r = 0; r < group[m].size(); ++r) {
        std::size_t s;
        if (std::holds_alternative<std::monostate>(group[m][r])) {
          if (!none_series) {
            none_series = out.series.size();
            out.series.push_back({"None", kNeutralGray, {}});
          }
          s = *none_series;
        } else {
          s = index.at(category_name(group[m][r]));
        }
        out.series[s].members.push_back({m, r});
        out.point_series[m][r] = s;
        out.point_colors[m][r] = out.series[s].color;
      }
    }
    return out;
  }

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& block : group) {
    for (const auto& v : block) {
      if (const auto* d = std::get_if<double>(&v); d && std::isfinite(*d)) {
        lo = std::min(lo, *d);
        hi = std::max(hi, *d);
      }
    }
  }
  if (!(lo <= hi)) throw DataError("group labels contain no finite numeric value");

  out.bins.resize(group.size());
  std::map<int, std::size_t> bin_series;
  bool any_nonfinite = false;
  for (std::size_t m = 0; m < group.size(); ++m) {
    out.bins[m].resize(group[m].size());
    for (std::size_t r = 0; r < group[m].size(); ++r) {
      const auto* d = std::get_if<double>(&group[m][r]);
      const bool finite = d && std::isfinite(*d);
      out.bins[m][r] = finite ? value_bin(*d, lo, hi, n_bins) : -1;
      if (finite) {
        bin_series.emplace(out.bins[m][r], 0);
      } else {
        any_nonfinite = true;
      }
    }
  }
  const double width = (hi - lo) / n_bins;
  for (auto& [bin, s] : bin_series) {
    s = out.series.size();
    const double t = n_bins > 1 ? static_cast<double>(bin) / (n_bins - 1) : 0.0;
    const bool last = bin == n_bins - 1;
    const std::string name = "[" + format_number(lo + bin * width) + ", " +
                             format_number(last ? hi : lo + (bin + 1) * width) + (last ? "]" : ")");
    out.series.push_back({name, palette.at(t), {}});
  }
  const std::size_t gray = out.series.size();
  if (any_nonfinite) out.series.push_back({"non-finite", kNeutralGray, {}});

  for (std::size_t m = 0; m < group.size(); ++m) {
    for (std::size_t r = 0; r < group[m].size(); ++r) {
      const int bin = out.bins[m][r];
      const std::size_t s = bin < 0 ? gray : bin_series.at(bin);
      out.series[s].members.push_back({m, r});
      out.point_series[m][r] = s;
      out.point_colors[m][r] = out.series[s].color;
    }
  }
  return out;
}

std::string auto_label(std::size_t index, const Eigen::VectorXd& coords) {
  std::string text = std::to_string(index) + ": (";
  for (Eigen::Index i = 0; i < coords.size(); ++i) {
    if (i > 0) text += ", ";
    text += one_decimal(coords(i));
  }
  return text + ")";
}

std::vector<PointLabel> make_labels(const DataList& points, const std::optional<PointLabels>& labels,
                                    bool explore) {
  std::vector<PointLabel> out;
  if (labels) {
    check_lengths(row_counts(points), labels->size(), [&](std::size_t i) { return (*labels)[i].size(); },
                  "labels");
    for (std::size_t m = 0; m < labels->size(); ++m) {
      for (std::size_t r = 0; r < (*labels)[m].size(); ++r) {
        if ((*labels)[m][r]) out.push_back({{m, r}, *(*labels)[m][r]});
      }
    }
    return out;
  }
  if (!explore) return out;
  for (std::size_t m = 0; m < points.size(); ++m) {
    for (std::size_t r = 0; r < points[m].rows(); ++r) {
      out.push_back({{m, r}, auto_label(r, points[m].values().row(static_cast<Eigen::Index>(r)).transpose())});
    }
  }
  return out;
}

Scene build_scene(const DataList& data, const SceneOptions& options, const PaletteRegistry& palettes) {
  if (data.empty()) throw UsageError("no data to plot");
  if (options.ndims != 2 && options.ndims != 3) {
    throw UsageError("ndims must be 2 or 3 for plotting, got " + std::to_string(options.ndims));
  }
  const Palette& palette = palettes.get(options.palette);
  const auto counts = row_counts(data);
  const std::size_t n = data.size();
  auto per_matrix = [n](std::size_t size, const char* what) {
    if (size > 1 && size != n) {
      throw UsageError(std::string("got ") + std::to_string(size) + " " + what + " for " + std::to_string(n) +
                       " datasets");
    }
  };
  per_matrix(options.formats.size(), "format strings");
  per_matrix(options.colors.size(), "colours");
  if (options.names.size() > 0 && options.names.size() != n) {
    throw UsageError("got " + std::to_string(options.names.size()) + " series names for " + std::to_string(n) +
                     " datasets");
  }
  std::vector<FormatSpec> formats;
  for (const auto& f : options.formats) formats.push_back(parse_format_string(f));
  if (options.labels) {
    check_lengths(counts, options.labels->size(), [&](std::size_t i) { return (*options.labels)[i].size(); },
                  "labels");
  }

  // (1) imputation
  DataList complete = data;
  std::vector<std::vector<bool>> imputed(n);
  bool any_missing = false;
  for (std::size_t m = 0; m < n; ++m) {
    imputed[m].assign(counts[m], false);
    for (Eigen::Index r = 0; r < data[m].missing().rows(); ++r) {
      if (data[m].missing().row(r).any()) {
        imputed[m][static_cast<std::size_t>(r)] = true;
        any_missing = true;
      }
    }
  }
  if (any_missing) {
    const DataMatrix stacked = stack(data);
    if (stacked.cols() < 2) throw DataError("cannot impute missing values in single-column data");
    const int rank = std::min<int>(options.ndims, static_cast<int>(stacked.cols()) - 1);
    complete = split_rows(fit_ppca(stacked, rank, options.reduce.ppca).completed, counts);
  }

  // (2) reduction
  std::size_t max_f = 0;
  for (const auto& m : complete) max_f = std::max(max_f, m.cols());
  const int dim = max_f < 3 ? 2 : options.ndims;
  DataList coords;
  if (static_cast<int>(max_f) > dim) {
    ReduceOptions reduce = options.reduce;
    reduce.ndims = dim;
    coords = reduce_list(complete, reduce);
  } else {
    for (const auto& m : complete) coords.push_back(m);
  }
  std::vector<Eigen::MatrixXd> xyz;
  for (const auto& m : coords) xyz.push_back(to_scene_coords(m.values(), dim));

  Scene scene;
  scene.dimension = dim;
  scene.explore = options.explore;
  scene.camera = options.camera;
  scene.animation = options.animation;

  auto base_style = [&](std::size_t m) {
    Style style;
    if (!formats.empty()) {
      const auto& f = formats[formats.size() == 1 ? 0 : m];
      style.marker = f.marker;
      style.line = f.line;
      if (f.color) style.color = *f.color;
    }
    return style;
  };

  // (3) series and colours
  std::map<std::pair<std::size_t, std::size_t>, std::pair<std::size_t, std::size_t>> where;
  if (options.group) {
    const ColorAssignment colors = assign_colors(counts, *options.group, palette, options.n_bins);
    for (const auto& g : colors.series) {
      Series s;
      s.name = g.name;
      s.style = base_style(0);
      s.style.color = g.color;
      s.points.resize(static_cast<Eigen::Index>(g.members.size()), dim);
      for (std::size_t i = 0; i < g.members.size(); ++i) {
        const auto& p = g.members[i];
        s.points.row(static_cast<Eigen::Index>(i)) = xyz[p.matrix].row(static_cast<Eigen::Index>(p.row));
        if (imputed[p.matrix][p.row]) s.imputed.push_back(i);
        where[{p.matrix, p.row}] = {scene.series.size(), i};
      }
      scene.series.push_back(std::move(s));
    }
  } else {
    for (std::size_t m = 0; m < n; ++m) {
      Series s;
      s.name = options.names.empty() ? "series " + std::to_string(m) : options.names[m];
      s.style = base_style(m);
      const bool format_color = !formats.empty() && formats[formats.size() == 1 ? 0 : m].color;
      if (!options.colors.empty()) {
        s.style.color = options.colors[options.colors.size() == 1 ? 0 : m];
      } else if (!format_color) {
        s.style.color = palette.category(m, n);
      }
      s.points = xyz[m];
      for (std::size_t r = 0; r < counts[m]; ++r) {
        if (imputed[m][r]) s.imputed.push_back(r);
        where[{m, r}] = {m, r};
      }
      scene.series.push_back(std::move(s));
    }
  }

  // (4) labels
  DataList label_coords;
  for (const auto& x : xyz) label_coords.emplace_back(x);
  for (const auto& l : make_labels(label_coords, options.labels, options.explore)) {
    const auto [s, i] = where.at({l.at.matrix, l.at.row});
    scene.labels.push_back({s, i, l.text, scene.series[s].points.row(static_cast<Eigen::Index>(i)).transpose()});
  }

  scene.validate();
  return scene;
}

}  // namespace hyperspace
