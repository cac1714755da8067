#pragma once

#include "hyperspace/datamat.hpp"
#include "hyperspace/palette.hpp"
#include "hyperspace/reduce.hpp"
#include "hyperspace/render.hpp"
#include "hyperspace/scene.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hyperspace {

enum class AlignMode { None, Hyper, Srm };

AlignMode parse_align_mode(std::string_view name);
std::string_view to_string(AlignMode mode);

/// Everything `plot` accepts besides the input files.
struct PlotOptions {
  int ndims = 3;
  ReduceMethod method = ReduceMethod::PCA;
  bool animate = false;
  std::optional<std::string> group;   // column name in the inputs, or a label file
  std::optional<std::string> labels;  // label file, one line per row
  bool explore = false;
  std::optional<int> n_clusters;
  std::string palette = "default";
  std::vector<std::string> formats;
  std::vector<std::string> colors;
  AnimationSpec animation;
  std::optional<std::string> save;
  AlignMode align = AlignMode::None;
  NormalizeMode normalize = NormalizeMode::None;
  std::uint64_t seed = 0;
  int n_bins = 100;
  double perplexity = 30.0;
  bool header = true;
  Viewport viewport;
};

/// Field names follow the CLI flags with dashes turned into underscores.
/// Unknown fields and ill-typed values raise UsageError.
nlohmann::json plot_options_to_json(const PlotOptions& options);
PlotOptions plot_options_from_json(const nlohmann::json& doc, PlotOptions base = {});

/// One parsed input file.
struct PlotInput {
  std::string name;
  ParsedCsv table;
};

PlotInput read_plot_input(const std::filesystem::path& path, bool header);

/// Splits the inputs into data and optional group/point labels. A group
/// column is removed from the data before conversion.
struct PreparedInputs {
  DataList data;
  std::optional<GroupLabels> group;
  std::optional<PointLabels> labels;
  std::vector<std::string> names;
};
PreparedInputs prepare_inputs(const std::vector<PlotInput>& inputs, const PlotOptions& options);

/// Reads a one-column label file and splits it over datasets of the given sizes.
std::vector<std::vector<Cell>> read_label_file(const std::filesystem::path& path,
                                               const std::vector<std::size_t>& row_counts);

/// Cells that all parse as numbers become numeric labels; otherwise strings.
GroupLabels to_group_labels(const std::vector<std::vector<Cell>>& cells);

/// normalize -> align -> cluster -> build_scene.
Scene plot_scene(const PreparedInputs& inputs, const PlotOptions& options,
                 const PaletteRegistry& palettes = PaletteRegistry::builtin());

enum class SaveKind { Scene, Svg, Frames };

/// ".scene.json" saves the scene, ".svg" a static render, and anything else
/// (an existing directory or a path without extension) animation frames.
SaveKind save_kind(const std::filesystem::path& path);
void save_plot(const Scene& scene, const std::filesystem::path& path, const Viewport& viewport = {});

}  // namespace hyperspace
