#pragma once

#include "hyperspace/align.hpp"
#include "hyperspace/reduce.hpp"
#include "hyperspace/scene.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace hyperspace {

inline constexpr std::string_view kSceneFormat = "hyperspace-scene";
inline constexpr int kSceneFormatVersion = 1;

nlohmann::json scene_to_json(const Scene& scene);
/// Throws DataError on a wrong format tag, unsupported version, missing or
/// mistyped fields, or a scene that fails validation.
Scene scene_from_json(const nlohmann::json& doc);

/// Canonical bytes: sorted keys, two-space indent, trailing newline.
std::string serialize_scene(const Scene& scene);
Scene parse_scene(std::string_view text);

void save_scene(const Scene& scene, const std::filesystem::path& path);
Scene load_scene(const std::filesystem::path& path);

/// Lower-case hex SHA-256 of serialize_scene(scene).
std::string scene_hash(const Scene& scene);
std::string sha256_hex(std::string_view bytes);

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows);

nlohmann::json model_to_json(const ReductionModel& model);
ReductionModel model_from_json(const nlohmann::json& doc);

nlohmann::json transform_to_json(const AlignmentTransform& t);
AlignmentTransform transform_from_json(const nlohmann::json& doc);

}  // namespace hyperspace
