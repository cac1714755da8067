#include "hyperspace/palette.hpp"

#include "hyperspace/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>

namespace hyperspace {

namespace {

int hex_digit(char ch) {
  if (ch >= '0' && ch <= '9') return ch - '0';
  if (ch >= 'a' && ch <= 'f') return ch - 'a' + 10;
  if (ch >= 'A' && ch <= 'F') return ch - 'A' + 10;
  return -1;
}

Rgb lerp(const Rgb& a, const Rgb& b, double t) {
  return {a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t};
}

std::vector<Rgb> from_hex(std::initializer_list<std::string_view> codes) {
  std::vector<Rgb> out;
  for (auto code : codes) out.push_back(parse_hex_color(code));
  return out;
}

double srgb_gamma(double linear) {
  linear = std::clamp(linear, 0.0, 1.0);
  return linear <= 0.0031308 ? 12.92 * linear : 1.055 * std::pow(linear, 1.0 / 2.4) - 0.055;
}

// CIE LCh(uv) with D65 white to sRGB, clipped to the gamut.
Rgb lchuv_to_rgb(double lightness, double chroma, double hue_deg) {
  constexpr double kUn = 0.19783000664283;
  constexpr double kVn = 0.46831999493879;
  const double h = hue_deg * std::numbers::pi / 180.0;
  const double u = chroma * std::cos(h);
  const double v = chroma * std::sin(h);
  const double y = lightness > 8.0 ? std::pow((lightness + 16.0) / 116.0, 3.0) : lightness / 903.3;
  const double up = u / (13.0 * lightness) + kUn;
  const double vp = v / (13.0 * lightness) + kVn;
  const double x = y * 9.0 * up / (4.0 * vp);
  const double z = y * (12.0 - 3.0 * up - 20.0 * vp) / (4.0 * vp);
  const double r = 3.2404542 * x - 1.5371385 * y - 0.4985314 * z;
  const double g = -0.9692660 * x + 1.8760108 * y + 0.0415560 * z;
  const double b = 0.0556434 * x - 0.2040259 * y + 1.0572252 * z;
  return {srgb_gamma(r), srgb_gamma(g), srgb_gamma(b)};
}

std::vector<Rgb> hue_circle() {
  constexpr int kStops = 72;
  std::vector<Rgb> stops;
  for (int i = 0; i < kStops; ++i) {
    stops.push_back(lchuv_to_rgb(65.0, 45.0, 3.6 + 360.0 * i / kStops));
  }
  return stops;
}

Palette::Kind parse_kind(const std::string& kind) {
  if (kind == "categorical") return Palette::Kind::Categorical;
  if (kind == "sequential") return Palette::Kind::Sequential;
  if (kind == "cyclic") return Palette::Kind::Cyclic;
  throw DataError("unknown palette kind '" + kind + "'");
}

}  // namespace

Rgb parse_hex_color(std::string_view hex) {
  if (hex.size() != 7 || hex.front() != '#') {
    throw UsageError("malformed hex colour '" + std::string(hex) + "' (expected #RRGGBB)");
  }
  double channels[3];
  for (int i = 0; i < 3; ++i) {
    const int hi = hex_digit(hex[1 + 2 * i]);
    const int lo = hex_digit(hex[2 + 2 * i]);
    if (hi < 0 || lo < 0) {
      throw UsageError("malformed hex colour '" + std::string(hex) + "' (expected #RRGGBB)");
    }
    channels[i] = (hi * 16 + lo) / 255.0;
  }
  return {channels[0], channels[1], channels[2]};
}

std::string to_hex(const Rgb& color) {
  auto channel = [](double v) { return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", channel(color.r), channel(color.g), channel(color.b));
  return buf;
}

Palette::Palette(std::string name, Kind kind, std::vector<Rgb> stops)
    : name_(std::move(name)), kind_(kind), stops_(std::move(stops)) {
  if (stops_.empty()) throw DataError("palette '" + name_ + "' has no colours");
}

Rgb Palette::at(double t) const {
  if (stops_.size() == 1 || !std::isfinite(t)) return stops_.front();
  const auto n = static_cast<double>(stops_.size());
  if (kind_ == Kind::Cyclic) {
    t -= std::floor(t);
    const double pos = t * n;
    const auto i = static_cast<std::size_t>(std::floor(pos)) % stops_.size();
    return lerp(stops_[i], stops_[(i + 1) % stops_.size()], pos - std::floor(pos));
  }
  t = std::clamp(t, 0.0, 1.0);
  const double pos = t * (n - 1.0);
  const auto i = std::min(static_cast<std::size_t>(std::floor(pos)), stops_.size() - 2);
  return lerp(stops_[i], stops_[i + 1], pos - static_cast<double>(i));
}

Rgb Palette::category(std::size_t i, std::size_t n) const {
  switch (kind_) {
    case Kind::Categorical:
      return stops_[i % stops_.size()];
    case Kind::Cyclic:
      return at(n == 0 ? 0.0 : static_cast<double>(i) / static_cast<double>(n));
    case Kind::Sequential:
      return at(n <= 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return stops_.front();
}

PaletteRegistry PaletteRegistry::builtin() {
  PaletteRegistry reg;
  reg.add(Palette("default", Palette::Kind::Categorical,
                  from_hex({"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
                            "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"})));
  // Nine-class diverging blue -> white -> red.
  reg.add(Palette("RdBu_r", Palette::Kind::Sequential,
                  from_hex({"#2166ac", "#4393c3", "#92c5de", "#d1e5f0", "#f7f7f7", "#fddbc7",
                            "#f4a582", "#d6604d", "#b2182b"})));
  reg.add(Palette("husl", Palette::Kind::Cyclic, hue_circle()));
  reg.add(Palette("gray", Palette::Kind::Sequential, from_hex({"#000000", "#d9d9d9"})));
  return reg;
}

PaletteRegistry PaletteRegistry::from_environment() {
  PaletteRegistry reg = builtin();
  if (const char* dir = std::getenv("HYPERSPACE_PALETTE_DIR"); dir && *dir) {
    reg.load_directory(dir);
  }
  return reg;
}

void PaletteRegistry::load_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw DataError("palette directory '" + dir.string() + "' does not exist");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    std::ifstream in(file);
    try {
      const auto doc = nlohmann::json::parse(in);
      std::vector<Rgb> colors;
      for (const auto& c : doc.at("colors")) colors.push_back(parse_hex_color(c.get<std::string>()));
      add(Palette(doc.at("name").get<std::string>(),
                  parse_kind(doc.value("kind", std::string("categorical"))), std::move(colors)));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("palette file '" + file.string() + "': " + e.what());
    }
  }
}

void PaletteRegistry::add(Palette palette) {
  auto name = palette.name();
  palettes_.insert_or_assign(std::move(name), std::move(palette));
}

const Palette& PaletteRegistry::get(std::string_view name) const {
  const auto it = palettes_.find(name);
  if (it == palettes_.end()) throw UsageError("unknown palette '" + std::string(name) + "'");
  return it->second;
}

bool PaletteRegistry::contains(std::string_view name) const { return palettes_.find(name) != palettes_.end(); }

std::vector<std::string> PaletteRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : palettes_) out.push_back(name);
  return out;
}

}  // namespace hyperspace
