#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hyperspace/animation.hpp"
#include "hyperspace/error.hpp"
#include "hyperspace/render.hpp"
#include "hyperspace/scene_io.hpp"
#include "support.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <random>
#include <regex>

using namespace hyperspace;
using testing::normal_matrix;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = HYPERSPACE_FIXTURE_DIR;
const fs::path kGolden = HYPERSPACE_GOLDEN_DIR;

std::size_t count(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

Eigen::MatrixXd unit_cube() {
  Eigen::MatrixXd c(8, 3);
  for (int i = 0; i < 8; ++i) c.row(i) << (i & 1), (i >> 1) & 1, (i >> 2) & 1;
  return c;
}

Scene random_scene(std::size_t n_series, std::mt19937_64& rng, Marker marker = Marker::None) {
  Scene scene;
  for (std::size_t i = 0; i < n_series; ++i) {
    Series s;
    s.name = "s" + std::to_string(i);
    s.points = normal_matrix(12, 3, rng);
    s.style = {{0.2, 0.4, 0.6}, marker, LineStyle::Solid, 1.0};
    scene.series.push_back(s);
  }
  return scene;
}

std::string axes_path(const std::string& svg) {
  const auto start = svg.find("<g class=\"axes\"");
  return svg.substr(start, svg.find("</g>", start) - start);
}

}  // namespace

TEST_CASE("front view keeps x and z") {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd p = normal_matrix(10, 3, rng);
  const Projection proj = project(p, {0.0, 0.0, 1.0}, {800, 600});
  for (Eigen::Index i = 1; i < p.rows(); ++i) {
    const double sx = (proj.screen(i, 0) - proj.screen(0, 0)) / (p(i, 0) - p(0, 0));
    const double sy = (proj.screen(i, 1) - proj.screen(0, 1)) / (p(i, 2) - p(0, 2));
    CHECK(sx == doctest::Approx(proj.scale).epsilon(1e-9));
    CHECK(sy == doctest::Approx(-proj.scale).epsilon(1e-9));
    // Depth is the dropped y axis.
    CHECK(proj.depth(i) - proj.depth(0) == doctest::Approx(p(i, 1) - p(0, 1)).epsilon(1e-9));
  }
}

TEST_CASE("unit cube corners stay inside the margin box") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> angle(-360.0, 360.0);
  const Eigen::MatrixXd cube = unit_cube();
  for (const Viewport vp : {Viewport{800, 600}, Viewport{300, 900}, Viewport{101, 101}}) {
    for (int trial = 0; trial < 50; ++trial) {
      const Projection p = project(cube, {angle(rng), angle(rng), 1.0}, vp);
      for (Eigen::Index i = 0; i < 8; ++i) {
        CHECK(p.screen(i, 0) >= 0.05 * vp.width);
        CHECK(p.screen(i, 0) <= 0.95 * vp.width);
        CHECK(p.screen(i, 1) >= 0.05 * vp.height);
        CHECK(p.screen(i, 1) <= 0.95 * vp.height);
      }
    }
  }
}

TEST_CASE("half turn of azimuth mirrors screen-x order") {
  Eigen::MatrixXd p(2, 3);
  p << -1, 0, 0, 1, 0, 0;
  for (double az : {0.0, 30.0, -75.0}) {
    const Projection a = project(p, {az, 20.0, 1.0}, {400, 400});
    const Projection b = project(p, {az + 180.0, 20.0, 1.0}, {400, 400});
    const double da = a.screen(1, 0) - a.screen(0, 0);
    const double db = b.screen(1, 0) - b.screen(0, 0);
    CHECK(da * db < 0);
    CHECK(std::abs(da + db) < 1e-9);
  }
}

TEST_CASE("projection keeps collinear points collinear") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(-180.0, 180.0);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::RowVector3d a = normal_matrix(1, 3, rng);
    const Eigen::RowVector3d b = normal_matrix(1, 3, rng);
    Eigen::MatrixXd line(25, 3);
    for (int i = 0; i < 25; ++i) line.row(i) = a + (i / 24.0 - 0.3) * (b - a);
    const Projection p = project(line, {angle(rng), angle(rng), 0.7}, {800, 600});
    const Eigen::RowVector2d d = (p.screen.row(24) - p.screen.row(0)).normalized();
    for (int i = 0; i < 25; ++i) {
      const Eigen::RowVector2d v = p.screen.row(i) - p.screen.row(0);
      CHECK(std::abs(v(0) * d(1) - v(1) * d(0)) < 1e-6);
    }
  }
}

TEST_CASE("depth order is back to front") {
  std::mt19937_64 rng(4);
  const Eigen::MatrixXd p = normal_matrix(40, 3, rng);
  const Projection proj = project(p, {-60.0, 30.0, 1.0}, {800, 600});
  for (std::size_t i = 1; i < proj.order.size(); ++i) {
    CHECK(proj.depth(static_cast<Eigen::Index>(proj.order[i - 1])) >=
          proj.depth(static_cast<Eigen::Index>(proj.order[i])));
  }
}

TEST_CASE("degenerate and invalid projections") {
  const Eigen::MatrixXd same = Eigen::MatrixXd::Constant(3, 3, 2.0);
  const Projection p = project(same, {}, {200, 100});
  for (Eigen::Index i = 0; i < 3; ++i) {
    CHECK(p.screen(i, 0) == 100.0);
    CHECK(p.screen(i, 1) == 50.0);
  }
  CHECK_THROWS_AS(project(same, {}, {0, 100}), UsageError);
  CHECK_THROWS_AS(project(same, {0, 0, 0.0}, {100, 100}), UsageError);
}

TEST_CASE("zoom magnifies about the centre") {
  std::mt19937_64 rng(5);
  const Eigen::MatrixXd p = normal_matrix(5, 3, rng);
  const Projection near = project(p, {10, 10, 0.5}, {500, 500});
  const Projection far = project(p, {10, 10, 1.0}, {500, 500});
  CHECK(near.scale == doctest::Approx(2.0 * far.scale));
  const Eigen::MatrixXd off_near = near.screen.array() - 250.0;
  const Eigen::MatrixXd off_far = far.screen.array() - 250.0;
  CHECK((off_near - 2.0 * off_far).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("svg structure") {
  std::mt19937_64 rng(6);
  SUBCASE("no labels means no text") {
    const std::string svg = render_svg(random_scene(2, rng));
    CHECK(count(svg, "<text") == 0);
    CHECK(svg.rfind("</svg>\n") == svg.size() - 7);
  }
  SUBCASE("one group per series in input order") {
    Scene scene = random_scene(3, rng);
    scene.series[1].name = "b<&>";
    const std::string svg = render_svg(scene);
    CHECK(count(svg, "<g class=\"series\"") == 3);
    const auto p0 = svg.find("id=\"series-0\" data-name=\"s0\"");
    const auto p1 = svg.find("id=\"series-1\" data-name=\"b&lt;&amp;&gt;\"");
    const auto p2 = svg.find("id=\"series-2\" data-name=\"s2\"");
    CHECK(p0 < p1);
    CHECK(p1 < p2);
    CHECK(p2 != std::string::npos);
  }
  SUBCASE("dash patterns follow the line style") {
    Scene scene = random_scene(3, rng);
    scene.series[1].style.line = LineStyle::Dashed;
    scene.series[2].style.line = LineStyle::Dotted;
    const std::string svg = render_svg(scene);
    CHECK(count(svg, "stroke-dasharray=\"6,4\"") == 1);
    CHECK(count(svg, "stroke-dasharray=\"1.5,3\"") == 1);
  }
  SUBCASE("labels become text with leader lines") {
    Scene scene = random_scene(1, rng);
    scene.labels.push_back({0, 3, "three", scene.series[0].points.row(3).transpose()});
    scene.labels.push_back({0, 7, "seven", scene.series[0].points.row(7).transpose()});
    const std::string svg = render_svg(scene);
    CHECK(count(svg, "<text") == 2);
    CHECK(count(svg, "<line") == 2);
    scene.explore = true;
    const std::string hover = render_svg(scene);
    CHECK(count(hover, "<text") == 0);
    CHECK(count(hover, "<title>three</title>") == 1);
  }
  SUBCASE("byte determinism") {
    const Scene scene = random_scene(2, rng, Marker::Triangle);
    CHECK(render_svg(scene) == render_svg(scene));
    CHECK(render_svg(scene, {.viewport = {640, 480}}) != render_svg(scene));
  }
  SUBCASE("zero viewport") { CHECK_THROWS_AS(render_svg(random_scene(1, rng), {.viewport = {0, 10}}), UsageError); }
}

TEST_CASE("nearer markers are emitted later") {
  std::mt19937_64 rng(7);
  const Scene scene = random_scene(3, rng, Marker::Circle);
  const Camera camera{-60.0, 30.0, 1.0};
  const Viewport vp{800, 600};
  const std::string svg = render_svg(scene, {.viewport = vp, .camera = camera});
  const BoundingCube cube = bounding_cube(scene);

  const std::regex marker(R"re(data-series="(\d+)" data-point="(\d+)")re");
  std::vector<double> depths;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), marker); it != std::sregex_iterator(); ++it) {
    const auto s = std::stoul((*it)[1]);
    const auto i = std::stol((*it)[2]);
    depths.push_back(project(scene.series[s].points, camera, vp, cube).depth(i));
  }
  CHECK(depths.size() == 36);
  for (std::size_t i = 1; i < depths.size(); ++i) CHECK(depths[i] <= depths[i - 1]);
}

TEST_CASE("golden SVGs") {
  SUBCASE("spiral") {
    const Scene scene = load_scene(kFixtures / "spiral.scene.json");
    CHECK(render_svg(scene) == testing::read_file(kGolden / "spiral.svg"));
  }
  SUBCASE("styled 2D") {
    const Scene scene = load_scene(kFixtures / "styled2d.scene.json");
    CHECK(render_svg(scene, {.viewport = {640, 480}}) == testing::read_file(kGolden / "styled2d.svg"));
  }
  SUBCASE("animation frame") {
    const Scene scene = load_scene(kFixtures / "animated.scene.json");
    CHECK(render_svg(scene, {.frame = 30}) == testing::read_file(kGolden / "animated-frame-30.svg"));
  }
}

TEST_CASE("frames show the active window") {
  const Scene scene = load_scene(kFixtures / "animated.scene.json");
  const Frame f = animation_frame(scene, 30);
  const std::string svg = render_svg(scene, {.frame = 30});
  const auto [start, end, trail] = f.windows[0];
  CHECK(trail);
  CHECK(count(svg, "class=\"trail\"") == 1);
  CHECK(count(svg, "<circle") == end + 1);
  CHECK(count(svg, "fill-opacity=\"0.200\"") == start);
}

TEST_CASE("animation frames and manifest") {
  Scene scene = load_scene(kFixtures / "animated.scene.json");
  REQUIRE(scene.animation.has_value());
  CHECK(frame_count(*scene.animation) == 60);
  const auto dir = testing::temp_dir("frames");
  const AnimationManifest m = render_animation(scene, dir, {320, 240});
  CHECK(m.frame_count == 60);
  CHECK(fs::exists(dir / "frame-00000.svg"));
  CHECK(fs::exists(dir / "frame-00059.svg"));
  CHECK_FALSE(fs::exists(dir / "frame-00060.svg"));

  const auto doc = nlohmann::json::parse(testing::read_file(dir / "manifest.json"));
  CHECK(doc["frame_count"] == 60);
  CHECK(doc["frame_rate"] == 30.0);
  CHECK(doc["width"] == 320);
  CHECK(doc["height"] == 240);
  CHECK(doc["scene_hash"] == scene_hash(scene));
  CHECK(doc["scene_hash"] == sha256_hex(serialize_scene(scene)));

  SUBCASE("one full turn ends where it started") {
    const std::string first = testing::read_file(dir / "frame-00000.svg");
    const std::string last = testing::read_file(dir / "frame-00059.svg");
    CHECK(axes_path(first) == axes_path(last));
    CHECK(first != last);
  }
  SUBCASE("hash follows the scene bytes") {
    const Scene same = parse_scene(serialize_scene(scene));
    CHECK(scene_hash(same) == m.scene_hash);
    scene.series[0].points(0, 0) += 1e-9;
    CHECK(scene_hash(scene) != m.scene_hash);
  }
  SUBCASE("unwritable target") {
    testing::write_file(dir / "blocker", "x");
    CHECK_THROWS_AS(render_animation(scene, dir / "blocker" / "out"), DataError);
  }
}
