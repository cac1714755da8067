#include "hyperspace/scene_io.hpp"

#include "hyperspace/error.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <sstream>

namespace hyperspace {

using nlohmann::json;

namespace {

json color_to_json(const Rgb& c) { return json::array({c.r, c.g, c.b}); }

Rgb color_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw DataError("colour must be an [r, g, b] array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) throw DataError("expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

Eigen::MatrixXd points_from_json(const json& rows, int dim) {
  if (!rows.is_array()) throw DataError("points must be an array of coordinate arrays");
  if (rows.empty()) return Eigen::MatrixXd(0, dim);
  return matrix_from_json(rows);
}

const json& field(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw DataError(std::string("missing field '") + key + "'");
  return *it;
}

template <typename T>
T value_or(const json& obj, const char* key, T fallback) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  return it->get<T>();
}

}  // namespace

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
  if (!rows.is_array()) throw DataError("matrix must be an array of rows");
  if (rows.empty()) return {};
  const std::size_t cols = rows.front().is_array() ? rows.front().size() : 0;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!rows[r].is_array() || rows[r].size() != cols) throw DataError("matrix rows have unequal lengths");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!rows[r][c].is_number()) throw DataError("matrix entries must be numbers");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c].get<double>();
    }
  }
  return m;
}

json scene_to_json(const Scene& scene) {
  json doc;
  doc["format"] = kSceneFormat;
  doc["version"] = kSceneFormatVersion;
  doc["dimension"] = scene.dimension;
  doc["explore"] = scene.explore;
  doc["camera"] = {{"azimuth", scene.camera.azimuth},
                   {"elevation", scene.camera.elevation},
                   {"zoom", scene.camera.zoom}};
  json series = json::array();
  for (const auto& s : scene.series) {
    series.push_back({{"name", s.name},
                      {"points", matrix_to_json(s.points)},
                      {"imputed", s.imputed},
                      {"style",
                       {{"color", color_to_json(s.style.color)},
                        {"marker", to_string(s.style.marker)},
                        {"line", to_string(s.style.line)},
                        {"opacity", s.style.opacity}}}});
  }
  doc["series"] = std::move(series);
  json labels = json::array();
  for (const auto& l : scene.labels) {
    labels.push_back(
        {{"series", l.series}, {"point", l.point}, {"text", l.text}, {"anchor", vector_to_json(l.anchor)}});
  }
  doc["labels"] = std::move(labels);
  if (scene.animation) {
    const auto& a = *scene.animation;
    doc["animation"] = {{"duration_s", a.duration_s}, {"tail_duration_s", a.tail_duration_s},
                        {"rotations", a.rotations},   {"zoom", a.zoom},
                        {"chemtrails", a.chemtrails}, {"frame_rate", a.frame_rate}};
  } else {
    doc["animation"] = nullptr;
  }
  return doc;
}

Scene scene_from_json(const json& doc) {
  try {
    if (!doc.is_object()) throw DataError("scene document must be a JSON object");
    const auto format = value_or<std::string>(doc, "format", "");
    if (format != kSceneFormat) {
      throw DataError("not a scene document (format is '" + format + "', expected '" +
                      std::string(kSceneFormat) + "')");
    }
    const int version = field(doc, "version").get<int>();
    if (version != kSceneFormatVersion) {
      throw DataError("unsupported scene version " + std::to_string(version) + " (this build reads version " +
                      std::to_string(kSceneFormatVersion) + ")");
    }
    Scene scene;
    scene.dimension = field(doc, "dimension").get<int>();
    scene.explore = value_or<bool>(doc, "explore", false);
    if (const auto it = doc.find("camera"); it != doc.end() && !it->is_null()) {
      const CameraSpec d;
      scene.camera.azimuth = value_or<double>(*it, "azimuth", d.azimuth);
      scene.camera.elevation = value_or<double>(*it, "elevation", d.elevation);
      scene.camera.zoom = value_or<double>(*it, "zoom", d.zoom);
    }
    for (const auto& s : field(doc, "series")) {
      Series series;
      series.name = value_or<std::string>(s, "name", "");
      series.points = points_from_json(field(s, "points"), scene.dimension);
      series.imputed = value_or<std::vector<std::size_t>>(s, "imputed", {});
      const auto& style = field(s, "style");
      series.style.color = color_from_json(field(style, "color"));
      series.style.marker = parse_marker(value_or<std::string>(style, "marker", "none"));
      series.style.line = parse_line_style(value_or<std::string>(style, "line", "solid"));
      series.style.opacity = value_or<double>(style, "opacity", 1.0);
      scene.series.push_back(std::move(series));
    }
    if (const auto it = doc.find("labels"); it != doc.end() && !it->is_null()) {
      for (const auto& l : *it) {
        scene.labels.push_back({field(l, "series").get<std::size_t>(), field(l, "point").get<std::size_t>(),
                                field(l, "text").get<std::string>(), vector_from_json(field(l, "anchor"))});
      }
    }
    if (const auto it = doc.find("animation"); it != doc.end() && !it->is_null()) {
      const AnimationSpec d;
      AnimationSpec a;
      a.duration_s = value_or<double>(*it, "duration_s", d.duration_s);
      a.tail_duration_s = value_or<double>(*it, "tail_duration_s", d.tail_duration_s);
      a.rotations = value_or<double>(*it, "rotations", d.rotations);
      a.zoom = value_or<double>(*it, "zoom", d.zoom);
      a.chemtrails = value_or<bool>(*it, "chemtrails", d.chemtrails);
      a.frame_rate = value_or<double>(*it, "frame_rate", d.frame_rate);
      scene.animation = a;
    }
    scene.validate();
    return scene;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed scene document: ") + e.what());
  }
}

std::string serialize_scene(const Scene& scene) { return scene_to_json(scene).dump(2) + "\n"; }

Scene parse_scene(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("scene file is not valid JSON: ") + e.what());
  }
  return scene_from_json(doc);
}

void save_scene(const Scene& scene, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write scene file '" + path.string() + "'");
  out << serialize_scene(scene);
  if (!out) throw DataError("failed writing scene file '" + path.string() + "'");
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read scene file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scene(buf.str());
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw DataError("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::string scene_hash(const Scene& scene) { return sha256_hex(serialize_scene(scene)); }

json model_to_json(const ReductionModel& model) {
  return {{"method", to_string(model.method)},
          {"mean", vector_to_json(model.mean)},
          {"components", matrix_to_json(model.components)},
          {"explained_variance", vector_to_json(model.explained_variance)},
          {"noise_variance", model.noise_variance}};
}

ReductionModel model_from_json(const json& doc) {
  try {
    ReductionModel m;
    m.method = parse_reduce_method(field(doc, "method").get<std::string>());
    m.mean = vector_from_json(field(doc, "mean"));
    m.components = matrix_from_json(field(doc, "components"));
    m.explained_variance = vector_from_json(field(doc, "explained_variance"));
    m.noise_variance = value_or<double>(doc, "noise_variance", 0.0);
    if (m.components.cols() != m.mean.size() || m.explained_variance.size() != m.components.rows()) {
      throw DataError("reduction model fields have inconsistent sizes");
    }
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed reduction model: ") + e.what());
  }
}

json transform_to_json(const AlignmentTransform& t) {
  return {{"rotation", matrix_to_json(t.rotation)},
          {"scale", t.scale},
          {"source_offset", vector_to_json(t.source_offset)},
          {"target_offset", vector_to_json(t.target_offset)}};
}

AlignmentTransform transform_from_json(const json& doc) {
  try {
    AlignmentTransform t;
    t.rotation = matrix_from_json(field(doc, "rotation"));
    t.scale = field(doc, "scale").get<double>();
    t.source_offset = vector_from_json(field(doc, "source_offset"));
    t.target_offset = vector_from_json(field(doc, "target_offset"));
    const auto f = t.rotation.rows();
    if (t.rotation.cols() != f || t.source_offset.size() != f || t.target_offset.size() != f) {
      throw DataError("alignment transform fields have inconsistent sizes");
    }
    return t;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed alignment transform: ") + e.what());
  }
}

}  // namespace hyperspace
