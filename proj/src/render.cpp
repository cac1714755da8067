#include "hyperspace/render.hpp"

#include "hyperspace/animation.hpp"
#include "hyperspace/error.hpp"
#include "hyperspace/scene_io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>

namespace hyperspace {

namespace {

constexpr double kMargin = 0.05;
constexpr double kLineWidth = 1.5;
constexpr double kMarkerSize = 3.0;

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += ch;
    }
  }
  return out;
}

Eigen::MatrixXd as_3d(const Eigen::MatrixXd& points) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(points.rows(), 3);
  out.leftCols(std::min<Eigen::Index>(points.cols(), 3)) = points.leftCols(std::min<Eigen::Index>(points.cols(), 3));
  return out;
}

std::string point_list(const Projection& p, std::size_t first, std::size_t last) {
  std::string out;
  for (std::size_t i = first; i <= last; ++i) {
    if (i > first) out += ' ';
    const auto r = static_cast<Eigen::Index>(i);
    out += format_coord(p.screen(r, 0)) + "," + format_coord(p.screen(r, 1));
  }
  return out;
}

std::string dash_attributes(LineStyle line) {
  switch (line) {
    case LineStyle::Dashed: return " stroke-dasharray=\"6,4\"";
    case LineStyle::Dotted: return " stroke-dasharray=\"1.5,3\" stroke-linecap=\"round\"";
    default: return "";
  }
}

std::string marker_element(Marker marker, double x, double y, const std::string& color, double opacity,
                           std::size_t series, std::size_t point) {
  const std::string common = " fill=\"" + color + "\" fill-opacity=\"" + format_coord(opacity) +
                             "\" data-series=\"" + std::to_string(series) + "\" data-point=\"" +
                             std::to_string(point) + "\"/>";
  switch (marker) {
    case Marker::Square:
      return "<rect x=\"" + format_coord(x - kMarkerSize) + "\" y=\"" + format_coord(y - kMarkerSize) +
             "\" width=\"" + format_coord(2 * kMarkerSize) + "\" height=\"" + format_coord(2 * kMarkerSize) + "\"" +
             common;
    case Marker::Triangle: {
      const double h = kMarkerSize * 1.2;
      return "<polygon points=\"" + format_coord(x) + "," + format_coord(y - h) + " " + format_coord(x - h) + "," +
             format_coord(y + h * 0.8) + " " + format_coord(x + h) + "," + format_coord(y + h * 0.8) + "\"" + common;
    }
    default:
      return "<circle cx=\"" + format_coord(x) + "\" cy=\"" + format_coord(y) + "\" r=\"" +
             format_coord(marker == Marker::None ? kMarkerSize * 0.7 : kMarkerSize) + "\"" + common;
  }
}

struct MarkerItem {
  double depth;
  std::size_t series;
  std::size_t point;
  double opacity;
  Marker marker;
};

std::string axes_group(const BoundingCube& cube, int dimension, const Camera& camera, const Viewport& viewport) {
  const double h = cube.half_extent;
  std::string out = "<g class=\"axes\" fill=\"none\" stroke=\"#cccccc\" stroke-width=\"1\">\n";
  std::vector<std::pair<int, int>> edges;
  Eigen::MatrixXd corners;
  if (dimension == 3) {
    corners.resize(8, 3);
    for (int i = 0; i < 8; ++i) {
      corners.row(i) = cube.center.transpose() +
                       h * Eigen::RowVector3d((i & 1) ? 1 : -1, (i & 2) ? 1 : -1, (i & 4) ? 1 : -1);
      for (int bit : {1, 2, 4}) {
        if (!(i & bit)) edges.emplace_back(i, i | bit);
      }
    }
  } else {
    corners.resize(4, 2);
    const Eigen::RowVector2d c = cube.center.head<2>().transpose();
    corners << c + Eigen::RowVector2d(-h, -h), c + Eigen::RowVector2d(h, -h), c + Eigen::RowVector2d(h, h),
        c + Eigen::RowVector2d(-h, h);
    edges = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  }
  const Projection p = project(corners, camera, viewport, cube);
  std::string d;
  for (const auto& [a, b] : edges) {
    d += "M" + format_coord(p.screen(a, 0)) + "," + format_coord(p.screen(a, 1)) + "L" +
         format_coord(p.screen(b, 0)) + "," + format_coord(p.screen(b, 1));
  }
  out += "<path d=\"" + d + "\"/>\n</g>\n";
  return out;
}

}  // namespace

Camera Camera::from_spec(const CameraSpec& spec) {
  return {spec.azimuth, spec.elevation, std::exp2(-spec.zoom)};
}

std::string format_coord(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

BoundingCube bounding_cube(const Eigen::MatrixXd& points) {
  BoundingCube cube;
  if (points.rows() == 0) return cube;
  const Eigen::MatrixXd p = as_3d(points);
  const Eigen::Vector3d lo = p.colwise().minCoeff().transpose();
  const Eigen::Vector3d hi = p.colwise().maxCoeff().transpose();
  cube.center = (lo + hi) / 2.0;
  cube.half_extent = ((hi - lo) / 2.0).maxCoeff();
  return cube;
}

BoundingCube bounding_cube(const Scene& scene) {
  Eigen::MatrixXd all(static_cast<Eigen::Index>(scene.point_count()), 3);
  Eigen::Index row = 0;
  for (const auto& s : scene.series) {
    all.middleRows(row, s.points.rows()) = as_3d(s.points);
    row += s.points.rows();
  }
  return bounding_cube(all);
}

Projection project(const Eigen::MatrixXd& points, const Camera& camera, const Viewport& viewport) {
  return project(points, camera, viewport, bounding_cube(points));
}

Projection project(const Eigen::MatrixXd& points, const Camera& camera, const Viewport& viewport,
                   const BoundingCube& cube) {
  if (viewport.width <= 0 || viewport.height <= 0) {
    throw UsageError("viewport must have positive width and height");
  }
  if (!(camera.distance > 0.0)) throw UsageError("camera distance must be positive");
  const bool flat = points.cols() == 2;
  const Eigen::Index n = points.rows();
  const double radius = cube.half_extent * std::sqrt(flat ? 2.0 : 3.0);
  Projection out;
  out.scale = radius > 0.0 ? (0.5 - kMargin) * std::min(viewport.width, viewport.height) / radius / camera.distance
                           : 1.0;
  out.screen.resize(n, 2);
  out.depth = Eigen::VectorXd::Zero(n);

  const double a = camera.azimuth * std::numbers::pi / 180.0;
  const double e = camera.elevation * std::numbers::pi / 180.0;
  const double ca = std::cos(a), sa = std::sin(a), ce = std::cos(e), se = std::sin(e);
  const Eigen::MatrixXd q = as_3d(points).rowwise() - cube.center.transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    double sx, up;
    if (flat) {
      sx = q(i, 0);
      up = q(i, 1);
    } else {
      const double x1 = q(i, 0) * ca + q(i, 1) * sa;
      const double y1 = -q(i, 0) * sa + q(i, 1) * ca;
      sx = x1;
      up = y1 * se + q(i, 2) * ce;
      out.depth(i) = y1 * ce - q(i, 2) * se;
    }
    out.screen(i, 0) = viewport.width / 2.0 + out.scale * sx;
    out.screen(i, 1) = viewport.height / 2.0 - out.scale * up;
  }
  out.order.resize(static_cast<std::size_t>(n));
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  std::stable_sort(out.order.begin(), out.order.end(), [&](std::size_t l, std::size_t r) {
    return out.depth(static_cast<Eigen::Index>(l)) > out.depth(static_cast<Eigen::Index>(r));
  });
  return out;
}

std::string render_svg(const Scene& scene, const RenderOptions& options) {
  const Viewport& vp = options.viewport;
  if (vp.width <= 0 || vp.height <= 0) throw UsageError("viewport must have positive width and height");
  scene.validate();

  std::optional<Frame> frame;
  if (options.frame) frame = animation_frame(scene, *options.frame);
  const Camera camera = options.camera ? *options.camera : frame ? frame->camera : Camera::from_spec(scene.camera);
  const BoundingCube cube = frame ? frame->bounds : bounding_cube(scene);

  std::string svg;
  const std::string w = std::to_string(vp.width);
  const std::string h = std::to_string(vp.height);
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + w + "\" height=\"" + h +
         "\" viewBox=\"0 0 " + w + " " + h + "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + w + "\" height=\"" + h + "\" fill=\"#ffffff\"/>\n";
  svg += axes_group(cube, scene.dimension, camera, vp);

  std::vector<Projection> projections;
  std::vector<MarkerItem> markers;
  for (std::size_t si = 0; si < scene.series.size(); ++si) {
    const Series& s = scene.series[si];
    projections.push_back(project(s.points, camera, vp, cube));
    const Projection& p = projections.back();
    const std::string color = to_hex(s.style.color);
    const auto rows = static_cast<std::size_t>(s.points.rows());

    std::size_t first = 0;
    std::size_t last = rows == 0 ? 0 : rows - 1;
    bool trail = false;
    if (frame) {
      first = frame->windows[si].start;
      last = frame->windows[si].end;
      trail = frame->windows[si].trail;
    }
    const double trail_opacity = kChemtrailOpacity * s.style.opacity;

    svg += "<g class=\"series\" id=\"series-" + std::to_string(si) + "\" data-name=\"" + escape_xml(s.name) +
           "\">\n";
    if (rows > 0 && s.style.line != LineStyle::None) {
      const std::string stroke = " fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
                                 format_coord(kLineWidth) + "\"" + dash_attributes(s.style.line);
      if (trail) {
        svg += "<polyline class=\"trail\" points=\"" + point_list(p, 0, first) + "\"" + stroke +
               " stroke-opacity=\"" + format_coord(trail_opacity) + "\"/>\n";
      }
      if (last > first) {
        svg += "<polyline points=\"" + point_list(p, first, last) + "\"" + stroke + " stroke-opacity=\"" +
               format_coord(s.style.opacity) + "\"/>\n";
      }
    }
    svg += "</g>\n";

    if (rows == 0) continue;
    const bool lone_point = s.style.marker == Marker::None && last == first;
    if (s.style.marker != Marker::None || lone_point) {
      if (trail && s.style.marker != Marker::None) {
        for (std::size_t i = 0; i < first; ++i) {
          markers.push_back({p.depth(static_cast<Eigen::Index>(i)), si, i, trail_opacity, s.style.marker});
        }
      }
      for (std::size_t i = first; i <= last; ++i) {
        markers.push_back({p.depth(static_cast<Eigen::Index>(i)), si, i, s.style.opacity, s.style.marker});
      }
    }
  }

  if (!markers.empty()) {
    std::stable_sort(markers.begin(), markers.end(),
                     [](const MarkerItem& l, const MarkerItem& r) { return l.depth > r.depth; });
    svg += "<g class=\"markers\">\n";
    for (const auto& m : markers) {
      const auto& p = projections[m.series];
      const auto i = static_cast<Eigen::Index>(m.point);
      svg += marker_element(m.marker, p.screen(i, 0), p.screen(i, 1), to_hex(scene.series[m.series].style.color),
                            m.opacity, m.series, m.point) +
             "\n";
    }
    svg += "</g>\n";
  }

  std::string labels;
  for (const auto& l : scene.labels) {
    if (frame && (l.point < frame->windows[l.series].start || l.point > frame->windows[l.series].end)) continue;
    const auto& p = projections[l.series];
    const auto i = static_cast<Eigen::Index>(l.point);
    const double x = p.screen(i, 0);
    const double y = p.screen(i, 1);
    if (scene.explore) {
      labels += "<circle cx=\"" + format_coord(x) + "\" cy=\"" + format_coord(y) +
                "\" r=\"6.000\" fill=\"#000000\" fill-opacity=\"0.000\"><title>" + escape_xml(l.text) +
                "</title></circle>\n";
    } else {
      labels += "<line x1=\"" + format_coord(x) + "\" y1=\"" + format_coord(y) + "\" x2=\"" +
                format_coord(x + 12.0) + "\" y2=\"" + format_coord(y - 12.0) +
                "\" stroke=\"#555555\" stroke-width=\"0.750\"/>\n";
      labels += "<text x=\"" + format_coord(x + 14.0) + "\" y=\"" + format_coord(y - 14.0) +
                "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#222222\">" + escape_xml(l.text) +
                "</text>\n";
    }
  }
  if (!labels.empty()) svg += "<g class=\"labels\">\n" + labels + "</g>\n";
  svg += "</svg>\n";
  return svg;
}

AnimationManifest render_animation(const Scene& scene, const std::filesystem::path& out_dir,
                                   const Viewport& viewport) {
  if (!scene.animation) throw UsageError("scene has no animation");
  const std::size_t frames = frame_count(*scene.animation);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw DataError("cannot create output directory '" + out_dir.string() + "'");
  }
  RenderOptions options;
  options.viewport = viewport;
  for (std::size_t f = 0; f < frames; ++f) {
    options.frame = f;
    char name[32];
    std::snprintf(name, sizeof(name), "frame-%05zu.svg", f);
    std::ofstream out(out_dir / name, std::ios::binary);
    out << render_svg(scene, options);
    if (!out) throw DataError("cannot write '" + (out_dir / name).string() + "'");
  }
  AnimationManifest manifest{scene.animation->frame_rate, frames, viewport.width, viewport.height,
                             scene_hash(scene)};
  const nlohmann::json doc = {{"frame_rate", manifest.frame_rate},
                              {"frame_count", manifest.frame_count},
                              {"width", manifest.width},
                              {"height", manifest.height},
                              {"scene_hash", manifest.scene_hash}};
  std::ofstream out(out_dir / "manifest.json", std::ios::binary);
  out << doc.dump(2) << "\n";
  if (!out) throw DataError("cannot write manifest in '" + out_dir.string() + "'");
  return manifest;
}

}  // namespace hyperspace
