#include "hyperspace/error.hpp"
#include "hyperspace/scene.hpp"

#include <charconv>
#include <cmath>

namespace hyperspace {

namespace {

std::optional<Rgb> letter_color(char ch) {
  switch (ch) {
    case 'b': return Rgb{0.0, 0.0, 1.0};
    case 'g': return Rgb{0.0, 0.5, 0.0};
    case 'r': return Rgb{1.0, 0.0, 0.0};
    case 'c': return Rgb{0.0, 0.75, 0.75};
    case 'm': return Rgb{0.75, 0.0, 0.75};
    case 'y': return Rgb{0.75, 0.75, 0.0};
    case 'k': return Rgb{0.0, 0.0, 0.0};
    case 'w': return Rgb{1.0, 1.0, 1.0};
    default: return std::nullopt;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view to_string(Marker marker) {
  switch (marker) {
    case Marker::None: return "none";
    case Marker::Circle: return "circle";
    case Marker::Square: return "square";
    case Marker::Triangle: return "triangle";
  }
  return "none";
}

std::string_view to_string(LineStyle line) {
  switch (line) {
    case LineStyle::None: return "none";
    case LineStyle::Solid: return "solid";
    case LineStyle::Dashed: return "dashed";
    case LineStyle::Dotted: return "dotted";
  }
  return "none";
}

Marker parse_marker(std::string_view name) {
  for (Marker m : {Marker::None, Marker::Circle, Marker::Square, Marker::Triangle}) {
    if (name == to_string(m)) return m;
  }
  throw DataError("unknown marker '" + std::string(name) + "'");
}

LineStyle parse_line_style(std::string_view name) {
  for (LineStyle l : {LineStyle::None, LineStyle::Solid, LineStyle::Dashed, LineStyle::Dotted}) {
    if (name == to_string(l)) return l;
  }
  throw DataError("unknown line style '" + std::string(name) + "'");
}

FormatSpec parse_format_string(std::string_view fmt) {
  if (fmt.empty()) throw UsageError("empty format string");
  FormatSpec spec;
  std::optional<Marker> marker;
  std::optional<LineStyle> line;
  auto fail = [&](char ch, const char* why) {
    throw UsageError("format string '" + std::string(fmt) + "': " + why + " '" + std::string(1, ch) + "'");
  };
  for (std::size_t i = 0; i < fmt.size(); ++i) {
    const char ch = fmt[i];
    if (auto c = letter_color(ch)) {
      if (spec.color) fail(ch, "second colour");
      spec.color = c;
    } else if (ch == 'o' || ch == 's' || ch == '^') {
      if (marker) fail(ch, "second marker");
      marker = ch == 'o' ? Marker::Circle : ch == 's' ? Marker::Square : Marker::Triangle;
    } else if (ch == '-' || ch == ':') {
      if (line) fail(ch, "second line style");
      if (ch == ':') {
        line = LineStyle::Dotted;
      } else if (i + 1 < fmt.size() && fmt[i + 1] == '-') {
        line = LineStyle::Dashed;
        ++i;
      } else {
        line = LineStyle::Solid;
      }
    } else {
      fail(ch, "unknown character");
    }
  }
  spec.marker = marker.value_or(Marker::None);
  spec.line = line.value_or(marker ? LineStyle::None : LineStyle::Solid);
  return spec;
}

Rgb parse_color(const std::array<double, 3>& rgb) {
  for (double v : rgb) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw UsageError("colour component " + std::to_string(v) + " is outside [0, 1]");
    }
  }
  return {rgb[0], rgb[1], rgb[2]};
}

Rgb parse_color(std::string_view spec) {
  spec = trim(spec);
  if (spec.size() == 1) {
    if (auto c = letter_color(spec.front())) return *c;
    throw UsageError("unknown colour letter '" + std::string(spec) + "'");
  }
  if (!spec.empty() && spec.front() == '#') return parse_hex_color(spec);

  if (spec.size() >= 2 && spec.front() == '(' && spec.back() == ')') spec = spec.substr(1, spec.size() - 2);
  std::array<double, 3> rgb{};
  std::size_t n = 0;
  while (true) {
    const auto comma = spec.find(',');
    const auto part = trim(spec.substr(0, comma));
    if (n == 3) throw UsageError("colour '" + std::string(spec) + "' has more than three components");
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), rgb[n]);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size()) {
      throw UsageError("cannot parse colour component '" + std::string(part) + "'");
    }
    ++n;
    if (comma == std::string_view::npos) break;
    spec.remove_prefix(comma + 1);
  }
  if (n != 3) throw UsageError("an RGB colour needs three components");
  return parse_color(rgb);
}

}  // namespace hyperspace
