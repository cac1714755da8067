#pragma once

#include "hyperspace/render.hpp"
#include "hyperspace/scene.hpp"

#include <cstddef>
#include <vector>

namespace hyperspace {

/// Visible part of one series in a frame. Points [start, end] form the active
/// window; with chemtrails, points [0, start] are drawn faintly behind it.
struct SeriesWindow {
  std::size_t start = 0;
  std::size_t end = 0;
  bool trail = false;
};

struct Frame {
  std::size_t index = 0;
  Camera camera;
  std::vector<SeriesWindow> windows;
  BoundingCube bounds;
};

inline constexpr double kChemtrailOpacity = 0.2;

/// round(duration_s * frame_rate), at least 1.
std::size_t frame_count(const AnimationSpec& spec);

/// Index of the newest visible sample of a series with `samples` points.
std::size_t window_end(std::size_t frame, std::size_t frames, std::size_t samples);
/// Number of samples before the window end that stay visible.
std::size_t tail_samples(const AnimationSpec& spec, std::size_t samples);

Frame animation_frame(const Scene& scene, std::size_t index);
std::vector<Frame> animation_frames(const Scene& scene);

}  // namespace hyperspace
