#include "hyperspace/pipeline.hpp"

#include "hyperspace/align.hpp"
#include "hyperspace/cluster.hpp"
#include "hyperspace/error.hpp"
#include "hyperspace/scene_io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace hyperspace {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

template <typename T>
void take(const json& doc, const char* key, T& out) {
  const auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return;
  out = it->get<T>();
}

}  // namespace

AlignMode parse_align_mode(std::string_view name) {
  if (name == "none") return AlignMode::None;
  if (name == "hyper") return AlignMode::Hyper;
  if (name == "srm") return AlignMode::Srm;
  throw UsageError("unknown align mode '" + std::string(name) + "' (expected none, hyper or srm)");
}

std::string_view to_string(AlignMode mode) {
  switch (mode) {
    case AlignMode::None: return "none";
    case AlignMode::Hyper: return "hyper";
    case AlignMode::Srm: return "srm";
  }
  return "none";
}

json plot_options_to_json(const PlotOptions& o) {
  json doc = {{"ndims", o.ndims},
              {"method", to_string(o.method)},
              {"animate", o.animate},
              {"explore", o.explore},
              {"palette", o.palette},
              {"formats", o.formats},
              {"colors", o.colors},
              {"duration", o.animation.duration_s},
              {"tail_duration", o.animation.tail_duration_s},
              {"rotations", o.animation.rotations},
              {"zoom", o.animation.zoom},
              {"chemtrails", o.animation.chemtrails},
              {"frame_rate", o.animation.frame_rate},
              {"align", to_string(o.align)},
              {"normalize", to_string(o.normalize)},
              {"seed", o.seed},
              {"n_bins", o.n_bins},
              {"perplexity", o.perplexity},
              {"header", o.header},
              {"width", o.viewport.width},
              {"height", o.viewport.height}};
  doc["group"] = o.group ? json(*o.group) : json(nullptr);
  doc["labels"] = o.labels ? json(*o.labels) : json(nullptr);
  doc["n_clusters"] = o.n_clusters ? json(*o.n_clusters) : json(nullptr);
  doc["save"] = o.save ? json(*o.save) : json(nullptr);
  return doc;
}

PlotOptions plot_options_from_json(const json& doc, PlotOptions o) {
  if (!doc.is_object()) throw UsageError("plot options must be a JSON object");
  static const std::set<std::string> known = {
      "ndims",    "method",     "animate", "explore", "palette", "formats", "colors",     "duration",
      "tail_duration", "rotations", "zoom", "chemtrails", "frame_rate", "align", "normalize", "seed",
      "n_bins",   "perplexity", "header",  "width",   "height",  "group",   "labels",     "n_clusters",
      "save"};
  for (const auto& [key, _] : doc.items()) {
    if (!known.count(key)) throw UsageError("unknown plot option '" + key + "'");
  }
  try {
    take(doc, "ndims", o.ndims);
    if (doc.contains("method") && !doc["method"].is_null()) {
      o.method = parse_reduce_method(doc["method"].get<std::string>());
    }
    take(doc, "animate", o.animate);
    take(doc, "explore", o.explore);
    take(doc, "palette", o.palette);
    take(doc, "formats", o.formats);
    take(doc, "colors", o.colors);
    take(doc, "duration", o.animation.duration_s);
    take(doc, "tail_duration", o.animation.tail_duration_s);
    take(doc, "rotations", o.animation.rotations);
    take(doc, "zoom", o.animation.zoom);
    take(doc, "chemtrails", o.animation.chemtrails);
    take(doc, "frame_rate", o.animation.frame_rate);
    if (doc.contains("align") && !doc["align"].is_null()) o.align = parse_align_mode(doc["align"].get<std::string>());
    if (doc.contains("normalize") && !doc["normalize"].is_null()) {
      o.normalize = parse_normalize_mode(doc["normalize"].get<std::string>());
    }
    take(doc, "seed", o.seed);
    take(doc, "n_bins", o.n_bins);
    take(doc, "perplexity", o.perplexity);
    take(doc, "header", o.header);
    take(doc, "width", o.viewport.width);
    take(doc, "height", o.viewport.height);
    for (auto [key, field] : {std::pair{"group", &o.group}, std::pair{"labels", &o.labels},
                              std::pair{"save", &o.save}}) {
      if (doc.contains(key)) {
        *field = doc[key].is_null() ? std::nullopt : std::optional(doc[key].get<std::string>());
      }
    }
    if (doc.contains("n_clusters")) {
      o.n_clusters = doc["n_clusters"].is_null() ? std::nullopt : std::optional(doc["n_clusters"].get<int>());
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("invalid plot options: ") + e.what());
  }
  return o;
}

PlotInput read_plot_input(const std::filesystem::path& path, bool header) {
  CsvOptions csv;
  csv.has_header = header;
  return {path.stem().string(), parse_csv_text(read_file(path), csv)};
}

std::vector<std::vector<Cell>> read_label_file(const std::filesystem::path& path,
                                               const std::vector<std::size_t>& row_counts) {
  CsvOptions csv;
  csv.missing_tokens = {""};
  std::string text = read_file(path);
  const ParsedCsv parsed = parse_csv_text(text, csv);
  if (parsed.rows.front().size() != 1) {
    throw UsageError("label file '" + path.string() + "' must have exactly one column");
  }
  std::size_t total = 0;
  for (auto n : row_counts) total += n;
  if (parsed.rows.size() != total) {
    throw UsageError("label file '" + path.string() + "' has " + std::to_string(parsed.rows.size()) +
                     " entries but the inputs have " + std::to_string(total) + " rows");
  }
  std::vector<std::vector<Cell>> out;
  std::size_t offset = 0;
  for (auto n : row_counts) {
    std::vector<Cell> block;
    for (std::size_t i = 0; i < n; ++i) block.push_back(parsed.rows[offset + i][0]);
    out.push_back(std::move(block));
    offset += n;
  }
  return out;
}

GroupLabels to_group_labels(const std::vector<std::vector<Cell>>& cells) {
  bool numeric = true;
  for (const auto& block : cells) {
    for (const auto& c : block) {
      if (c && !parse_numeric_cell(*c)) numeric = false;
    }
  }
  GroupLabels out;
  for (const auto& block : cells) {
    std::vector<LabelValue> values;
    for (const auto& c : block) {
      if (!c) {
        values.emplace_back(std::monostate{});
      } else if (numeric) {
        values.emplace_back(*parse_numeric_cell(*c));
      } else {
        values.emplace_back(*c);
      }
    }
    out.push_back(std::move(values));
  }
  return out;
}

PreparedInputs prepare_inputs(const std::vector<PlotInput>& inputs, const PlotOptions& options) {
  if (inputs.empty()) throw UsageError("at least one input is required");
  PreparedInputs out;
  std::vector<std::vector<Cell>> group_cells;
  bool group_is_column = false;
  if (options.group) {
    group_is_column = std::all_of(inputs.begin(), inputs.end(), [&](const PlotInput& in) {
      return std::find(in.table.header.begin(), in.table.header.end(), *options.group) != in.table.header.end();
    });
  }

  for (const auto& in : inputs) {
    ParsedCsv table = in.table;
    if (group_is_column) {
      const auto col = static_cast<std::size_t>(
          std::find(table.header.begin(), table.header.end(), *options.group) - table.header.begin());
      if (table.header.size() < 2) throw DataError("'" + in.name + "' has no columns besides the group column");
      std::vector<Cell> block;
      for (auto& row : table.rows) {
        block.push_back(row[col]);
        row.erase(row.begin() + static_cast<std::ptrdiff_t>(col));
      }
      table.header.erase(table.header.begin() + static_cast<std::ptrdiff_t>(col));
      group_cells.push_back(std::move(block));
    }
    out.data.push_back(table_to_matrix(table));
    out.names.push_back(in.name);
  }

  const auto counts = row_counts(out.data);
  if (options.group && !group_is_column) {
    if (!std::filesystem::is_regular_file(*options.group)) {
      throw UsageError("group '" + *options.group + "' is neither a column of every input nor a file");
    }
    group_cells = read_label_file(*options.group, counts);
  }
  if (options.group) out.group = to_group_labels(group_cells);
  if (options.labels) {
    PointLabels labels;
    for (const auto& block : read_label_file(*options.labels, counts)) {
      labels.emplace_back(block.begin(), block.end());
    }
    out.labels = std::move(labels);
  }
  return out;
}

Scene plot_scene(const PreparedInputs& inputs, const PlotOptions& options, const PaletteRegistry& palettes) {
  if (options.n_clusters && options.group) throw UsageError("--group and --n-clusters cannot be combined");
  DataList data = normalize(inputs.data, options.normalize);

  switch (options.align) {
    case AlignMode::None:
      break;
    case AlignMode::Hyper:
      data = hyperalign(data).aligned;
      break;
    case AlignMode::Srm: {
      std::size_t k = data.front().rows();
      for (const auto& m : data) k = std::min(k, m.cols());
      data = srm(data, static_cast<int>(k), 10, options.seed).projected;
      break;
    }
  }

  SceneOptions scene;
  scene.ndims = options.ndims;
  scene.reduce.method = options.method;
  scene.reduce.seed = options.seed;
  scene.reduce.perplexity = options.perplexity;
  scene.formats = options.formats;
  for (const auto& c : options.colors) scene.colors.push_back(parse_color(c));
  scene.group = inputs.group;
  scene.palette = options.palette;
  scene.n_bins = options.n_bins;
  scene.labels = inputs.labels;
  scene.explore = options.explore;
  if (options.animate) scene.animation = options.animation;
  scene.names = inputs.names;

  if (options.n_clusters) {
    KMeansOptions km;
    km.k = *options.n_clusters;
    km.seed = options.seed;
    GroupLabels group;
    for (const auto& block : kmeans_list(data, km)) {
      std::vector<LabelValue> values;
      for (int label : block) values.emplace_back("cluster " + std::to_string(label));
      group.push_back(std::move(values));
    }
    scene.group = std::move(group);
  }
  return build_scene(data, scene, palettes);
}

SaveKind save_kind(const std::filesystem::path& path) {
  const std::string s = path.string();
  if (ends_with(s, ".scene.json")) return SaveKind::Scene;
  if (ends_with(s, ".svg")) return SaveKind::Svg;
  if (std::filesystem::is_directory(path) || ends_with(s, "/") || !path.has_extension()) return SaveKind::Frames;
  throw UsageError("save path '" + s + "' must end in .scene.json or .svg, or name a directory for frames");
}

void save_plot(const Scene& scene, const std::filesystem::path& path, const Viewport& viewport) {
  switch (save_kind(path)) {
    case SaveKind::Scene:
      save_scene(scene, path);
      return;
    case SaveKind::Svg: {
      RenderOptions options;
      options.viewport = viewport;
      std::ofstream out(path, std::ios::binary);
      if (!out) throw DataError("cannot write '" + path.string() + "'");
      out << render_svg(scene, options);
      return;
    }
    case SaveKind::Frames:
      if (!scene.animation) throw UsageError("saving to a directory requires --animate");
      render_animation(scene, path, viewport);
      return;
  }
}

}  // namespace hyperspace
