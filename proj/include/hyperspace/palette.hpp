#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace hyperspace {

struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  bool operator==(const Rgb&) const = default;
};

/// "#RRGGBB" (case-insensitive). Throws UsageError when malformed.
Rgb parse_hex_color(std::string_view hex);
std::string to_hex(const Rgb& color);

/// Colour used for points whose group label is missing or non-finite.
inline constexpr Rgb kNeutralGray{0.5, 0.5, 0.5};

class Palette {
 public:
  enum class Kind {
    Categorical,  // fixed list, cycled
    Sequential,   // interpolated from first to last stop
    Cyclic,       // interpolated around a closed loop
  };

  Palette(std::string name, Kind kind, std::vector<Rgb> stops);

  const std::string& name() const { return name_; }
  Kind kind() const { return kind_; }
  const std::vector<Rgb>& stops() const { return stops_; }

  /// Colour at position t in [0, 1] (clamped; wrapped for cyclic palettes).
  Rgb at(double t) const;

  /// Colour for the i-th of n categories.
  Rgb category(std::size_t i, std::size_t n) const;

 private:
  std::string name_;
  Kind kind_;
  std::vector<Rgb> stops_;
};

/// Named palettes: "default" (10-colour categorical), "RdBu_r" (diverging,
/// blue to red), "husl" (even-lightness hue circle) and "gray".
class PaletteRegistry {
 public:
  static PaletteRegistry builtin();

  /// Builtins plus any palettes found in $HYPERSPACE_PALETTE_DIR.
  static PaletteRegistry from_environment();

  /// Loads every *.json file in `dir`. Each file holds
  /// {"name": ..., "kind": "categorical"|"sequential"|"cyclic", "colors": ["#RRGGBB", ...]}.
  void load_directory(const std::filesystem::path& dir);

  void add(Palette palette);
  const Palette& get(std::string_view name) const;
  bool contains(std::string_view name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, Palette, std::less<>> palettes_;
};

}  // namespace hyperspace
