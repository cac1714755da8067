#include "hyperspace/animation.hpp"

#include "hyperspace/error.hpp"

#include <algorithm>
#include <cmath>

namespace hyperspace {

namespace {

const AnimationSpec& require_animation(const Scene& scene) {
  if (!scene.animation) throw UsageError("scene has no animation");
  const auto& spec = *scene.animation;
  if (!(spec.duration_s > 0.0)) throw UsageError("animation duration must be positive");
  if (!(spec.frame_rate > 0.0)) throw UsageError("animation frame rate must be positive");
  if (!(spec.tail_duration_s >= 0.0)) throw UsageError("animation tail duration must be non-negative");
  return spec;
}

double progress(std::size_t frame, std::size_t frames) {
  return frames > 1 ? static_cast<double>(frame) / static_cast<double>(frames - 1) : 1.0;
}

}  // namespace

std::size_t frame_count(const AnimationSpec& spec) {
  if (!(spec.duration_s > 0.0)) throw UsageError("animation duration must be positive");
  if (!(spec.frame_rate > 0.0)) throw UsageError("animation frame rate must be positive");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(spec.duration_s * spec.frame_rate)));
}

std::size_t window_end(std::size_t frame, std::size_t frames, std::size_t samples) {
  if (samples == 0) return 0;
  const double pos = progress(frame, frames) * static_cast<double>(samples - 1);
  return std::min(samples - 1, static_cast<std::size_t>(std::llround(pos)));
}

std::size_t tail_samples(const AnimationSpec& spec, std::size_t samples) {
  return static_cast<std::size_t>(
      std::llround(spec.tail_duration_s / spec.duration_s * static_cast<double>(samples)));
}

Frame animation_frame(const Scene& scene, std::size_t index) {
  const auto& spec = require_animation(scene);
  const std::size_t frames = frame_count(spec);
  if (index >= frames) {
    throw UsageError("frame " + std::to_string(index) + " is out of range (" + std::to_string(frames) +
                     " frames)");
  }
  Frame frame;
  frame.index = index;
  frame.camera.azimuth = scene.camera.azimuth + 360.0 * spec.rotations * progress(index, frames);
  frame.camera.elevation = scene.camera.elevation;
  frame.camera.distance = std::exp2(-(scene.camera.zoom + spec.zoom));
  frame.bounds = bounding_cube(scene);
  for (const auto& s : scene.series) {
    const auto samples = static_cast<std::size_t>(s.points.rows());
    if (samples < 2) throw DataError("series '" + s.name + "' needs at least two points to animate");
    SeriesWindow w;
    w.end = window_end(index, frames, samples);
    w.start = w.end - std::min(w.end, tail_samples(spec, samples));
    w.trail = spec.chemtrails && w.start > 0;
    frame.windows.push_back(w);
  }
  return frame;
}

std::vector<Frame> animation_frames(const Scene& scene) {
  const std::size_t frames = frame_count(require_animation(scene));
  std::vector<Frame> out;
  out.reserve(frames);
  for (std::size_t i = 0; i < frames; ++i) out.push_back(animation_frame(scene, i));
  return out;
}

}  // namespace hyperspace
