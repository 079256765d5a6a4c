#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pitchrl/state.hpp"

namespace pitchrl {

using Rgb = std::array<std::uint8_t, 3>;

enum class ColorScale {
  Diverging,   // 0 -> defending blue, 0.5 -> white, 1 -> attacking red
  Sequential,  // 0 -> dark, max -> bright; values are divided by the field maximum
};

Rgb diverging_color(double v);
Rgb sequential_color(double u);

// What to draw: an m x n cell field (row-major, i along x) over the pitch,
// optionally with players and ball on top.
struct Scene {
  PitchSpec pitch{};
  std::vector<double> field;
  ColorScale scale = ColorScale::Diverging;
  std::optional<GameState> state;
};

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

  Rgb pixel(int x, int y) const;
};

inline constexpr int kPixelsPerMeter = 8;
inline constexpr int kMargin = 20;

// Pixel coordinates of a pitch point.
std::array<int, 2> to_pixel(Vec2 p);

Image rasterize(const Scene& scene);
void write_ppm(const Image& image, const std::filesystem::path& path);
std::string to_svg(const Scene& scene);

// Writes PPM (binary P6) for `.ppm` and SVG for `.svg`; FormatError otherwise.
void render_to_file(const Scene& scene, const std::filesystem::path& path);

}  // namespace pitchrl
