#pragma once

#include "hyperspace/datamat.hpp"
#include "hyperspace/palette.hpp"
#include "hyperspace/reduce.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hyperspace {

enum class Marker { None, Circle, Square, Triangle };
enum class LineStyle { None, Solid, Dashed, Dotted };

std::string_view to_string(Marker marker);
std::string_view to_string(LineStyle line);
Marker parse_marker(std::string_view name);
LineStyle parse_line_style(std::string_view name);

struct Style {
  Rgb color;
  Marker marker = Marker::None;
  LineStyle line = LineStyle::Solid;
  double opacity = 1.0;

  bool operator==(const Style&) const = default;
};

/// Matplotlib-style format string: one optional colour letter (bgrcmykw),
/// one optional marker (o s ^) and one optional line code (- -- :).
/// With neither marker nor line the line is solid; a lone marker draws no line.
/// `color` is nullopt when the string names no colour.
struct FormatSpec {
  std::optional<Rgb> color;
  Marker marker = Marker::None;
  LineStyle line = LineStyle::Solid;
};
FormatSpec parse_format_string(std::string_view fmt);

/// Single colour letter, "#RRGGBB", or "r,g,b" with components in [0, 1].
Rgb parse_color(std::string_view spec);
Rgb parse_color(const std::array<double, 3>& rgb);

struct Series {
  std::string name;
  Eigen::MatrixXd points;  // S x dimension
  Style style;
  std::vector<std::size_t> imputed;  // rows that held imputed values, ascending

  bool operator==(const Series& other) const;
};

struct Label {
  std::size_t series = 0;
  std::size_t point = 0;
  std::string text;
  Eigen::VectorXd anchor;  // coordinates of the labelled point

  bool operator==(const Label& other) const;
};

struct CameraSpec {
  double azimuth = -60.0;   // degrees
  double elevation = 30.0;  // degrees
  double zoom = 0.0;        // camera distance is 2^-zoom

  bool operator==(const CameraSpec&) const = default;
};

struct AnimationSpec {
  double duration_s = 30.0;
  double tail_duration_s = 2.0;
  double rotations = 2.0;
  double zoom = 0.0;
  bool chemtrails = false;
  double frame_rate = 30.0;

  bool operator==(const AnimationSpec&) const = default;
};

struct Scene {
  int dimension = 3;
  std::vector<Series> series;
  std::vector<Label> labels;
  bool explore = false;
  std::optional<AnimationSpec> animation;
  CameraSpec camera;

  /// Throws DataError if any invariant is broken.
  void validate() const;
  std::size_t point_count() const;

  bool operator==(const Scene&) const = default;
};

// ---------------------------------------------------------------------------
// Grouping and colouring

/// A group label: missing, numeric or categorical.
using LabelValue = std::variant<std::monostate, double, std::string>;
using GroupLabels = std::vector<std::vector<LabelValue>>;

struct PointRef {
  std::size_t matrix = 0;
  std::size_t row = 0;

  bool operator==(const PointRef&) const = default;
};

struct GroupSeries {
  std::string name;
  Rgb color;
  std::vector<PointRef> members;  // in input order
};

struct ColorAssignment {
  bool numeric = false;
  std::vector<std::vector<Rgb>> point_colors;
  std::vector<std::vector<std::size_t>> point_series;  // index into `series`
  std::vector<std::vector<int>> bins;  // numeric only; -1 for non-finite labels
  std::vector<GroupSeries> series;
};

/// Categorical labels (any string present) get palette colours in order of
/// first appearance, one series each; missing labels form a gray "None" series.
/// Numeric labels are min-max binned into `n_bins` equal-width bins, the
/// maximum landing in the last bin, with one series per occupied bin in
/// ascending order; non-finite labels form a gray series.
ColorAssignment assign_colors(const std::vector<std::size_t>& row_counts, const GroupLabels& group,
                              const Palette& palette, int n_bins = 100);

/// Bin of `value` among n_bins equal-width bins over [lo, hi].
int value_bin(double value, double lo, double hi, int n_bins);

// ---------------------------------------------------------------------------
// Labels

using PointLabels = std::vector<std::vector<std::optional<std::string>>>;

struct PointLabel {
  PointRef at;
  std::string text;
};

/// Explicit labels (nullopt entries stay blank), or "i: (x, y, z)" auto labels
/// for every point when `explore` is set and no labels are given.
std::vector<PointLabel> make_labels(const DataList& points, const std::optional<PointLabels>& labels,
                                    bool explore);

std::string auto_label(std::size_t index, const Eigen::VectorXd& coords);

// ---------------------------------------------------------------------------

struct SceneOptions {
  int ndims = 3;
  ReduceOptions reduce;  // ndims here is overridden by the scene dimension
  std::vector<std::string> formats;  // one for all series, or one per matrix
  std::vector<Rgb> colors;           // one for all series, or one per matrix
  std::optional<GroupLabels> group;
  std::string palette = "default";
  int n_bins = 100;
  std::optional<PointLabels> labels;
  bool explore = false;
  std::optional<AnimationSpec> animation;
  CameraSpec camera;
  std::vector<std::string> names;  // series names per matrix
};

/// Imputes, reduces, groups, labels and styles `data` into a Scene.
Scene build_scene(const DataList& data, const SceneOptions& options,
                  const PaletteRegistry& palettes = PaletteRegistry::builtin());

}  // namespace hyperspace
