#pragma once

#include "hyperspace/scene.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hyperspace {

struct Camera {
  double azimuth = -60.0;   // degrees
  double elevation = 30.0;  // degrees
  double distance = 1.0;    // > 0; smaller is closer

  static Camera from_spec(const CameraSpec& spec);
};

struct Viewport {
  int width = 800;
  int height = 600;
};

/// Axis-aligned cube enclosing a point set.
struct BoundingCube {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double half_extent = 0.0;
};

/// Cube around every series point of the scene (third axis zero in 2D).
BoundingCube bounding_cube(const Scene& scene);
BoundingCube bounding_cube(const Eigen::MatrixXd& points);

struct Projection {
  Eigen::MatrixXd screen;            // S x 2 pixel coordinates, y downwards
  Eigen::VectorXd depth;             // larger is farther from the viewer
  std::vector<std::size_t> order;    // back-to-front draw order
  double scale = 1.0;                // pixels per data unit
};

/// Orthographic projection of S x 3 (or S x 2) points. The camera turns the
/// scene by `azimuth` about the vertical axis and tilts it by `elevation`;
/// the cube's bounding sphere is fitted into the viewport with a 5% margin and
/// then magnified by 1 / distance. Two-column input is drawn flat.
Projection project(const Eigen::MatrixXd& points, const Camera& camera, const Viewport& viewport,
                   const BoundingCube& cube);
Projection project(const Eigen::MatrixXd& points, const Camera& camera, const Viewport& viewport);

struct RenderOptions {
  Viewport viewport;
  std::optional<Camera> camera;      // defaults to the scene camera or the frame camera
  std::optional<std::size_t> frame;  // render one frame of the scene's animation
};

/// Deterministic SVG 1.1 document for a static scene or a single frame.
std::string render_svg(const Scene& scene, const RenderOptions& options = {});

struct AnimationManifest {
  double frame_rate = 0.0;
  std::size_t frame_count = 0;
  int width = 0;
  int height = 0;
  std::string scene_hash;
};

/// Writes frame-00000.svg ... and manifest.json into `out_dir`.
AnimationManifest render_animation(const Scene& scene, const std::filesystem::path& out_dir,
                                   const Viewport& viewport = {});

/// Fixed-point "%.3f" with negative zero printed as 0.000.
std::string format_coord(double v);

}  // namespace hyperspace
