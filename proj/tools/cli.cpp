#include "cli.hpp"

#include "hyperspace/align.hpp"
#include "hyperspace/cluster.hpp"
#include "hyperspace/error.hpp"
#include "hyperspace/scene_io.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace hyperspace::cli {

namespace {

using nlohmann::json;

CsvOptions csv_options(bool header) {
  CsvOptions csv;
  csv.has_header = header;
  return csv;
}

std::string stem_of(const std::string& path) { return std::filesystem::path(path).stem().string(); }

void write_matrix(const DataMatrix& m, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    write_csv(m, out);
  } else {
    save_csv(m, path);
  }
}

void write_text(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot write '" + path + "'");
  file << text;
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string describe_svg(const DescribeResult& r) {
  constexpr double w = 480, h = 320, pad = 40;
  const double kmax = std::max(2, r.n_components.back());
  double lo = 1.0;
  for (double c : r.correlations) lo = std::min(lo, c);
  lo = std::min(lo, 0.0);
  auto sx = [&](double k) { return pad + (k - 1) / (kmax - 1) * (w - 2 * pad); };
  auto sy = [&](double c) { return h - pad - (c - lo) / (1.0 - lo) * (h - 2 * pad); };
  std::string pts;
  for (std::size_t i = 0; i < r.correlations.size(); ++i) {
    if (i) pts += ' ';
    pts += format_coord(sx(r.n_components[i])) + "," + format_coord(sy(r.correlations[i]));
  }
  std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"480\" height=\"320\" "
         "viewBox=\"0 0 480 320\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"480\" height=\"320\" fill=\"#ffffff\"/>\n";
  svg += "<path d=\"M" + format_coord(pad) + "," + format_coord(pad) + "L" + format_coord(pad) + "," +
         format_coord(h - pad) + "L" + format_coord(w - pad) + "," + format_coord(h - pad) +
         "\" fill=\"none\" stroke=\"#000000\"/>\n";
  svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2.000\"/>\n";
  svg += "<text x=\"240.000\" y=\"312.000\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">number of components</text>\n";
  svg += "<text x=\"12.000\" y=\"160.000\" transform=\"rotate(-90 12 160)\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"12\">correlation</text>\n";
  svg += "</svg>\n";
  return svg;
}

struct PlotFlags {
  std::string method = "pca";
  std::string align = "none";
  std::string normalize = "none";
  int n_clusters = 0;
  std::string group;
  std::string labels;
  std::string save;
  bool no_header = false;
};

void add_plot_options(CLI::App* cmd, PlotOptions& o, PlotFlags& f) {
  cmd->add_option("--ndims", o.ndims, "Plot dimensionality (2 or 3)");
  cmd->add_option("--method", f.method, "Reduction method: pca, ppca, mds, ica, tsne");
  cmd->add_flag("--animate", o.animate, "Build an animated scene");
  cmd->add_option("--group", f.group, "Group column name or label file");
  cmd->add_option("--labels", f.labels, "Point label file");
  cmd->add_flag("--explore", o.explore, "Auto-label points for hover display");
  cmd->add_option("--n-clusters", f.n_clusters, "Colour by k-means cluster");
  cmd->add_option("--palette", o.palette, "Palette name");
  cmd->add_option("--format,--fmt", o.formats, "Format string per input (e.g. k-, bo, r--)");
  cmd->add_option("--color", o.colors, "Colour per input (letter, #RRGGBB or r,g,b)");
  cmd->add_option("--duration", o.animation.duration_s, "Animation length in seconds");
  cmd->add_option("--tail-duration", o.animation.tail_duration_s, "Visible trail in seconds");
  cmd->add_option("--rotations", o.animation.rotations, "Camera revolutions over the animation");
  cmd->add_option("--zoom", o.animation.zoom, "Animation zoom");
  cmd->add_flag("--chemtrails", o.animation.chemtrails, "Show past samples faintly");
  cmd->add_option("--frame-rate", o.animation.frame_rate, "Frames per second");
  cmd->add_option("--align", f.align, "Alignment: none, hyper, srm");
  cmd->add_option("--normalize", f.normalize, "Normalization: none, across, within, rows");
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--n-bins", o.n_bins, "Bins for numeric group labels");
  cmd->add_option("--perplexity", o.perplexity, "t-SNE perplexity");
  cmd->add_flag("--no-header", f.no_header, "Inputs have no header row");
  cmd->add_option("--width", o.viewport.width, "SVG width in pixels");
  cmd->add_option("--height", o.viewport.height, "SVG height in pixels");
}

void finish_plot_options(PlotOptions& o, const PlotFlags& f, bool with_save) {
  o.method = parse_reduce_method(f.method);
  o.align = parse_align_mode(f.align);
  o.normalize = parse_normalize_mode(f.normalize);
  if (f.n_clusters != 0) {
    if (f.n_clusters < 1) throw UsageError("--n-clusters must be positive");
    o.n_clusters = f.n_clusters;
  }
  if (!f.group.empty()) o.group = f.group;
  if (!f.labels.empty()) o.labels = f.labels;
  if (with_save && !f.save.empty()) o.save = f.save;
  o.header = !f.no_header;
}

std::vector<PlotInput> read_inputs(const std::vector<std::string>& paths, bool header) {
  std::vector<PlotInput> inputs;
  for (const auto& p : paths) inputs.push_back(read_plot_input(p, header));
  return inputs;
}

json error_body(const std::string& message) { return {{"error", message}}; }

}  // namespace

std::unique_ptr<httplib::Server> make_server(std::vector<PlotInput> inputs, PlotOptions base) {
  auto server = std::make_unique<httplib::Server>();
  server->set_default_headers({{"Access-Control-Allow-Origin", "*"},
                               {"Access-Control-Allow-Methods", "POST, GET, OPTIONS"},
                               {"Access-Control-Allow-Headers", "Content-Type"}});
  server->Options("/recompute", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server->Get("/health", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"status":"ok"})", "application/json");
  });
  server->Get("/options", [base](const httplib::Request&, httplib::Response& res) {
    res.set_content(plot_options_to_json(base).dump(), "application/json");
  });
  server->Post("/recompute", [inputs = std::move(inputs), base](const httplib::Request& req,
                                                                httplib::Response& res) {
    try {
      json body;
      try {
        body = req.body.empty() ? json::object() : json::parse(req.body);
      } catch (const json::parse_error& e) {
        throw UsageError(std::string("request body is not valid JSON: ") + e.what());
      }
      if (body.contains("save") && !body["save"].is_null()) {
        throw UsageError("the recompute endpoint does not write files; drop 'save'");
      }
      const PlotOptions options = plot_options_from_json(body, base);
      const PreparedInputs prepared = prepare_inputs(inputs, options);
      const Scene scene = plot_scene(prepared, options, PaletteRegistry::from_environment());
      res.set_content(serialize_scene(scene), "application/json");
    } catch (const UsageError& e) {
      res.status = 400;
      res.set_content(error_body(e.what()).dump(), "application/json");
    } catch (const DataError& e) {
      res.status = 422;
      res.set_content(error_body(e.what()).dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(error_body(e.what()).dump(), "application/json");
    }
  });
  return server;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reduce, align, cluster and plot high-dimensional data", "hyperspace"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  // plot
  PlotOptions plot;
  PlotFlags plot_flags;
  std::vector<std::string> plot_inputs;
  auto* plot_cmd = app.add_subcommand("plot", "Build a scene and optionally render it");
  plot_cmd->add_option("inputs", plot_inputs, "CSV files")->required();
  add_plot_options(plot_cmd, plot, plot_flags);
  plot_cmd->add_option("--save", plot_flags.save, "Output: .scene.json, .svg or a directory for frames");

  // reduce
  std::string reduce_input, reduce_output, reduce_method = "pca", reduce_model;
  int reduce_ndims = 3;
  std::uint64_t reduce_seed = 0;
  double reduce_perplexity = 30.0;
  bool reduce_no_header = false;
  auto* reduce_cmd = app.add_subcommand("reduce", "Reduce a CSV to fewer dimensions");
  reduce_cmd->add_option("input", reduce_input, "CSV file")->required();
  reduce_cmd->add_option("--ndims", reduce_ndims, "Output dimensions");
  reduce_cmd->add_option("--method", reduce_method, "pca, ppca, mds, ica, tsne");
  reduce_cmd->add_option("--seed", reduce_seed, "Random seed");
  reduce_cmd->add_option("--perplexity", reduce_perplexity, "t-SNE perplexity");
  reduce_cmd->add_option("-o,--output", reduce_output, "Output CSV (default stdout)");
  reduce_cmd->add_option("--model", reduce_model, "Write the fitted linear model as JSON");
  reduce_cmd->add_flag("--no-header", reduce_no_header, "Input has no header row");

  // align
  std::vector<std::string> align_inputs;
  std::string align_method = "hyper", align_dir = ".", align_transforms;
  int align_k = 0, align_passes = 2;
  std::uint64_t align_seed = 0;
  bool align_no_header = false;
  auto* align_cmd = app.add_subcommand("align", "Align two or more datasets");
  align_cmd->add_option("inputs", align_inputs, "CSV files")->required();
  align_cmd->add_option("--method", align_method, "hyper, srm or procrustes");
  align_cmd->add_option("--k", align_k, "Shared dimensions for srm (default: smallest feature count)");
  align_cmd->add_option("--n-passes", align_passes, "Hyperalignment template passes");
  align_cmd->add_option("--seed", align_seed, "Random seed (srm)");
  align_cmd->add_option("--output-dir", align_dir, "Directory for <name>_aligned.csv outputs");
  align_cmd->add_option("--transforms", align_transforms, "Write fitted transforms as JSON");
  align_cmd->add_flag("--no-header", align_no_header, "Inputs have no header row");

  // cluster
  std::string cluster_input, cluster_output;
  int cluster_k = 3, cluster_n_init = 10;
  std::uint64_t cluster_seed = 0;
  bool cluster_no_header = false;
  auto* cluster_cmd = app.add_subcommand("cluster", "k-means cluster labels for a CSV");
  cluster_cmd->add_option("input", cluster_input, "CSV file")->required();
  cluster_cmd->add_option("--k", cluster_k, "Number of clusters");
  cluster_cmd->add_option("--seed", cluster_seed, "Random seed");
  cluster_cmd->add_option("--n-init", cluster_n_init, "Restarts");
  cluster_cmd->add_option("-o,--output", cluster_output, "Output CSV (default stdout)");
  cluster_cmd->add_flag("--no-header", cluster_no_header, "Input has no header row");

  // describe
  std::string describe_input, describe_output, describe_svg_path;
  bool describe_no_header = false;
  auto* describe_cmd = app.add_subcommand("describe", "Covariance preserved per number of components");
  describe_cmd->add_option("input", describe_input, "CSV file")->required();
  describe_cmd->add_option("-o,--output", describe_output, "Output CSV (default stdout)");
  describe_cmd->add_option("--svg", describe_svg_path, "Also draw the curve as SVG");
  describe_cmd->add_flag("--no-header", describe_no_header, "Input has no header row");

  // convert
  std::string convert_input, convert_output;
  bool convert_no_header = false;
  auto* convert_cmd = app.add_subcommand("convert", "Expand a categorical table to binary columns");
  convert_cmd->add_option("input", convert_input, "CSV file")->required();
  convert_cmd->add_option("-o,--output", convert_output, "Output CSV (default stdout)");
  convert_cmd->add_flag("--no-header", convert_no_header, "Input has no header row");

  // render
  std::string render_input, render_save;
  Viewport render_vp;
  std::optional<double> render_azimuth, render_elevation, render_zoom;
  std::optional<std::size_t> render_frame;
  auto* render_cmd = app.add_subcommand("render", "Render a scene file");
  render_cmd->add_option("scene", render_input, "Scene file")->required();
  render_cmd->add_option("--save", render_save, "Output .svg, or a directory for animation frames")->required();
  render_cmd->add_option("--width", render_vp.width, "Width in pixels");
  render_cmd->add_option("--height", render_vp.height, "Height in pixels");
  render_cmd->add_option("--azimuth", render_azimuth, "Camera azimuth in degrees");
  render_cmd->add_option("--elevation", render_elevation, "Camera elevation in degrees");
  render_cmd->add_option("--zoom", render_zoom, "Camera zoom");
  render_cmd->add_option("--frame", render_frame, "Render one animation frame");

  // serve
  PlotOptions serve;
  PlotFlags serve_flags;
  std::vector<std::string> serve_inputs;
  std::string serve_host = "127.0.0.1";
  int serve_port = 8765;
  auto* serve_cmd = app.add_subcommand("serve", "HTTP recompute endpoint for the viewer");
  serve_cmd->add_option("inputs", serve_inputs, "CSV files")->required();
  add_plot_options(serve_cmd, serve, serve_flags);
  serve_cmd->add_option("--host", serve_host, "Bind address");
  serve_cmd->add_option("--port", serve_port, "Port");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*plot_cmd) {
      finish_plot_options(plot, plot_flags, true);
      const auto inputs = read_inputs(plot_inputs, plot.header);
      if (plot.save) save_kind(*plot.save);
      const Scene scene = plot_scene(prepare_inputs(inputs, plot), plot, PaletteRegistry::from_environment());
      if (plot.save) {
        save_plot(scene, *plot.save, plot.viewport);
      } else {
        out << serialize_scene(scene);
      }
    } else if (*reduce_cmd) {
      const DataMatrix data = load_csv(reduce_input, csv_options(!reduce_no_header));
      const ReduceMethod method = parse_reduce_method(reduce_method);
      DataMatrix reduced = data;
      std::optional<ReductionModel> model;
      if (method == ReduceMethod::PCA || method == ReduceMethod::PPCA) {
        DataMatrix complete = data;
        if (method == ReduceMethod::PCA) {
          model = fit_pca(data, reduce_ndims);
        } else {
          PpcaResult fit = fit_ppca(data, reduce_ndims);
          model = fit.model;
          complete = fit.completed;
        }
        reduced = transform(*model, complete);
        const Eigen::MatrixXd back = inverse_transform(*model, reduced.values());
        const double rmse = std::sqrt((back - complete.values()).squaredNorm() / static_cast<double>(back.size()));
        err << "reconstruction_rmse: " << format_value(rmse) << "\n";
      } else {
        ReduceOptions ro;
        ro.method = method;
        ro.ndims = reduce_ndims;
        ro.seed = reduce_seed;
        ro.perplexity = reduce_perplexity;
        reduced = reduce_list({data}, ro).front();
      }
      write_matrix(DataMatrix(reduced.values(), dimension_names(reduced.values().cols())), reduce_output, out);
      if (!reduce_model.empty()) {
        if (!model) throw UsageError("--model is only available for pca and ppca");
        write_text(model_to_json(*model).dump(2) + "\n", reduce_model, out);
      }
    } else if (*align_cmd) {
      if (align_inputs.size() < 2) throw UsageError("align needs at least two inputs");
      DataList data;
      for (const auto& p : align_inputs) data.push_back(load_csv(p, csv_options(!align_no_header)));
      DataList aligned;
      json transforms = json::array();
      if (align_method == "hyper") {
        auto r = hyperalign(data, align_passes);
        aligned = std::move(r.aligned);
        for (const auto& t : r.transforms) transforms.push_back(transform_to_json(t));
      } else if (align_method == "procrustes") {
        aligned.push_back(data.front());
        for (std::size_t i = 1; i < data.size(); ++i) {
          auto r = procrustes(data[i], data.front());
          aligned.push_back(data[i].with_values(r.aligned.values()));
          transforms.push_back(transform_to_json(r.transform));
        }
      } else if (align_method == "srm") {
        int k = align_k;
        if (k == 0) {
          std::size_t smallest = data.front().rows();
          for (const auto& m : data) smallest = std::min(smallest, m.cols());
          k = static_cast<int>(smallest);
        }
        auto r = srm(data, k, 10, align_seed);
        aligned = std::move(r.projected);
        for (const auto& b : r.model.bases) transforms.push_back({{"basis", matrix_to_json(b)}});
      } else {
        throw UsageError("unknown align method '" + align_method + "' (expected hyper, srm or procrustes)");
      }
      const bool same_shape = std::all_of(data.begin(), data.end(), [&](const DataMatrix& m) {
        return m.rows() == data.front().rows() && m.cols() == data.front().cols();
      });
      if (same_shape) out << "mean_pairwise_correlation_before: " << format_value(mean_pairwise_correlation(data)) << "\n";
      out << "mean_pairwise_correlation_after: " << format_value(mean_pairwise_correlation(aligned)) << "\n";
      std::filesystem::create_directories(align_dir);
      for (std::size_t i = 0; i < aligned.size(); ++i) {
        const auto path = std::filesystem::path(align_dir) / (stem_of(align_inputs[i]) + "_aligned.csv");
        const auto& m = aligned[i];
        save_csv(m.cols() == data[i].cols() ? m : DataMatrix(m.values(), dimension_names(m.values().cols())), path);
        out << "wrote " << path.string() << "\n";
      }
      if (!align_transforms.empty()) {
        write_text(json{{"method", align_method}, {"transforms", transforms}}.dump(2) + "\n", align_transforms, out);
      }
    } else if (*cluster_cmd) {
      const DataMatrix data = load_csv(cluster_input, csv_options(!cluster_no_header));
      KMeansOptions km;
      km.k = cluster_k;
      km.seed = cluster_seed;
      km.n_init = cluster_n_init;
      const auto fit = kmeans(data, km);
      Eigen::MatrixXd labels(static_cast<Eigen::Index>(fit.labels.size()), 1);
      for (std::size_t i = 0; i < fit.labels.size(); ++i) labels(static_cast<Eigen::Index>(i), 0) = fit.labels[i];
      write_matrix(DataMatrix(labels, {"cluster"}), cluster_output, out);
      err << "inertia: " << format_value(fit.inertia) << "\n";
    } else if (*describe_cmd) {
      const DataMatrix data = load_csv(describe_input, csv_options(!describe_no_header));
      const DescribeResult r = describe_pca(data);
      std::string csv = "n_components,correlation\n";
      for (std::size_t i = 0; i < r.correlations.size(); ++i) {
        csv += std::to_string(r.n_components[i]) + "," + format_value(r.correlations[i]) + "\n";
      }
      write_text(csv, describe_output, out);
      if (!describe_svg_path.empty()) write_text(describe_svg(r), describe_svg_path, out);
    } else if (*convert_cmd) {
      const DataMatrix data = load_csv(convert_input, csv_options(!convert_no_header));
      write_matrix(data, convert_output, out);
    } else if (*render_cmd) {
      Scene scene = load_scene(render_input);
      if (render_azimuth) scene.camera.azimuth = *render_azimuth;
      if (render_elevation) scene.camera.elevation = *render_elevation;
      if (render_zoom) scene.camera.zoom = *render_zoom;
      const auto kind = save_kind(render_save);
      if (render_frame) {
        if (kind != SaveKind::Svg) throw UsageError("--frame renders a single .svg");
        RenderOptions ro;
        ro.viewport = render_vp;
        ro.frame = render_frame;
        write_text(render_svg(scene, ro), render_save, out);
      } else if (kind == SaveKind::Scene) {
        throw UsageError("render writes .svg files or frame directories");
      } else {
        save_plot(scene, render_save, render_vp);
      }
    } else if (*serve_cmd) {
      finish_plot_options(serve, serve_flags, false);
      auto server = make_server(read_inputs(serve_inputs, serve.header), serve);
      out << "listening on http://" << serve_host << ":" << serve_port << "\n" << std::flush;
      if (!server->listen(serve_host, serve_port)) {
        throw DataError("cannot listen on " + serve_host + ":" + std::to_string(serve_port));
      }
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace hyperspace::cli
