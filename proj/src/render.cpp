#include "pitchrl/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pitchrl/errors.hpp"

namespace pitchrl {

namespace {

constexpr Rgb kLine{255, 255, 255};
constexpr Rgb kGoal{255, 215, 0};
constexpr Rgb kDefender{30, 60, 200};
constexpr Rgb kKeeper{0, 150, 150};
constexpr Rgb kAttacker{220, 40, 40};
constexpr Rgb kArrow{20, 20, 20};
constexpr Rgb kBall{250, 250, 250};
constexpr Rgb kBackground{40, 40, 40};
constexpr double kPlayerRadius = 0.9;  // meters
constexpr double kArrowSeconds = 0.5;  // velocity arrow length in seconds of travel

std::uint8_t lerp(std::uint8_t a, std::uint8_t b, double t) {
  return static_cast<std::uint8_t>(std::lround(a + (b - a) * t));
}

Rgb mix(Rgb a, Rgb b, double t) { return {lerp(a[0], b[0], t), lerp(a[1], b[1], t), lerp(a[2], b[2], t)}; }

Rgb team_color(const PlayerState& p) {
  if (p.team == Team::Attacking) return kAttacker;
  return p.role == Role::LazyGoalkeeper ? kKeeper : kDefender;
}

std::vector<double> display_values(const Scene& scene) {
  std::vector<double> v = scene.field;
  if (scene.scale == ColorScale::Sequential) {
    double max = 0.0;
    for (double x : v) max = std::max(max, x);
    for (double& x : v) x = max > 0.0 ? x / max : 0.0;
  }
  return v;
}

Rgb cell_color(const Scene& scene, double value) {
  return scene.scale == ColorScale::Diverging ? diverging_color(value) : sequential_color(value);
}

std::string hex(Rgb c) {
  std::ostringstream out;
  out << '#' << std::hex;
  for (auto v : c) out << (v < 16 ? "0" : "") << static_cast<int>(v);
  return out.str();
}

class Canvas {
 public:
  explicit Canvas(Image& img) : img_(img) {}

  void put(int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= img_.width || y >= img_.height) return;
    const auto k = static_cast<std::size_t>((y * img_.width + x) * 3);
    img_.rgb[k] = c[0];
    img_.rgb[k + 1] = c[1];
    img_.rgb[k + 2] = c[2];
  }

  void fill_rect(int x0, int y0, int x1, int y1, Rgb c) {
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) put(x, y, c);
    }
  }

  void line(std::array<int, 2> a, std::array<int, 2> b, Rgb c, int thickness = 1) {
    const int steps = std::max({std::abs(b[0] - a[0]), std::abs(b[1] - a[1]), 1});
    for (int s = 0; s <= steps; ++s) {
      const double t = static_cast<double>(s) / steps;
      const int x = static_cast<int>(std::lround(a[0] + (b[0] - a[0]) * t));
      const int y = static_cast<int>(std::lround(a[1] + (b[1] - a[1]) * t));
      for (int dx = 0; dx < thickness; ++dx) {
        for (int dy = 0; dy < thickness; ++dy) put(x + dx, y + dy, c);
      }
    }
  }

  void disc(std::array<int, 2> c, int r, Rgb color) {
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) {
        if (dx * dx + dy * dy <= r * r) put(c[0] + dx, c[1] + dy, color);
      }
    }
  }

 private:
  Image& img_;
};

}  // namespace

Rgb diverging_color(double v) {
  constexpr Rgb blue{33, 102, 172};
  constexpr Rgb white{255, 255, 255};
  constexpr Rgb red{178, 24, 43};
  v = std::clamp(v, 0.0, 1.0);
  if (v <= 0.5) return mix(blue, white, v / 0.5);
  return mix(white, red, (v - 0.5) / 0.5);
}

Rgb sequential_color(double u) {
  constexpr std::array<Rgb, 4> stops{{{0, 0, 4}, {80, 18, 123}, {222, 73, 104}, {252, 253, 191}}};
  u = std::clamp(u, 0.0, 1.0);
  const double pos = u * (stops.size() - 1);
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(pos), stops.size() - 2);
  return mix(stops[k], stops[k + 1], pos - static_cast<double>(k));
}

Rgb Image::pixel(int x, int y) const {
  const auto k = static_cast<std::size_t>((y * width + x) * 3);
  return {rgb[k], rgb[k + 1], rgb[k + 2]};
}

std::array<int, 2> to_pixel(Vec2 p) {
  return {kMargin + static_cast<int>(std::lround(p.x * kPixelsPerMeter)),
          kMargin + static_cast<int>(std::lround(p.y * kPixelsPerMeter))};
}

Image rasterize(const Scene& scene) {
  const auto& pitch = scene.pitch;
  pitch.validate();
  const std::size_t cells = static_cast<std::size_t>(pitch.grid_m * pitch.grid_n);
  if (!scene.field.empty() && scene.field.size() != cells) {
    throw DimensionMismatch("render: field size does not match the pitch grid");
  }
  Image img;
  img.width = 2 * kMargin + static_cast<int>(std::lround(pitch.length * kPixelsPerMeter));
  img.height = 2 * kMargin + static_cast<int>(std::lround(pitch.width * kPixelsPerMeter));
  img.rgb.assign(static_cast<std::size_t>(img.width * img.height * 3), 0);
  Canvas canvas(img);
  canvas.fill_rect(0, 0, img.width, img.height, kBackground);

  const auto values = display_values(scene);
  for (int i = 0; i < pitch.grid_m; ++i) {
    for (int j = 0; j < pitch.grid_n; ++j) {
      const auto a = to_pixel({i * pitch.length / pitch.grid_m, j * pitch.width / pitch.grid_n});
      const auto b = to_pixel({(i + 1) * pitch.length / pitch.grid_m, (j + 1) * pitch.width / pitch.grid_n});
      const Rgb c = values.empty() ? Rgb{60, 120, 60} : cell_color(scene, values[static_cast<std::size_t>(i * pitch.grid_n + j)]);
      canvas.fill_rect(a[0], a[1], b[0], b[1], c);
    }
  }

  const auto tl = to_pixel({0, 0});
  const auto br = to_pixel({pitch.length, pitch.width});
  canvas.line(tl, {br[0], tl[1]}, kLine);
  canvas.line({br[0], tl[1]}, br, kLine);
  canvas.line(br, {tl[0], br[1]}, kLine);
  canvas.line({tl[0], br[1]}, tl, kLine);
  canvas.line(to_pixel({pitch.length / 2, 0}), to_pixel({pitch.length / 2, pitch.width}), kLine);
  const double c = pitch.width / 2.0;
  auto g0 = to_pixel({0, c - pitch.goal_half_width});
  auto g1 = to_pixel({0, c + pitch.goal_half_width});
  g0[0] -= 3;
  g1[0] -= 3;
  canvas.line(g0, g1, kGoal, 3);

  if (scene.state) {
    const int r = static_cast<int>(std::lround(kPlayerRadius * kPixelsPerMeter));
    for (const auto& p : scene.state->players) {
      canvas.line(to_pixel(p.position), to_pixel(p.position + p.velocity * kArrowSeconds), kArrow, 2);
    }
    for (const auto& p : scene.state->players) {
      const bool carrier = scene.state->ball.carrier && *scene.state->ball.carrier == p.id;
      if (carrier) canvas.disc(to_pixel(p.position), r + 2, kArrow);
      canvas.disc(to_pixel(p.position), r, team_color(p));
    }
    canvas.disc(to_pixel(scene.state->ball.position), 3, kBall);
  }
  return img;
}

void write_ppm(const Image& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write image: " + path.string());
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.rgb.data()), static_cast<std::streamsize>(image.rgb.size()));
}

std::string to_svg(const Scene& scene) {
  const auto& pitch = scene.pitch;
  pitch.validate();
  const std::size_t cells = static_cast<std::size_t>(pitch.grid_m * pitch.grid_n);
  if (!scene.field.empty() && scene.field.size() != cells) {
    throw DimensionMismatch("render: field size does not match the pitch grid");
  }
  const double s = kPixelsPerMeter;
  const double w = 2 * kMargin + pitch.length * s;
  const double h = 2 * kMargin + pitch.width * s;
  std::ostringstream out;
  out.precision(6);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"" << hex(kBackground) << "\"/>\n";
  out << "<g transform=\"translate(" << kMargin << "," << kMargin << ") scale(" << s << ")\">\n";
  const auto values = display_values(scene);
  const double cw = pitch.length / pitch.grid_m;
  const double ch = pitch.width / pitch.grid_n;
  for (int i = 0; i < pitch.grid_m; ++i) {
    for (int j = 0; j < pitch.grid_n; ++j) {
      const Rgb c = values.empty() ? Rgb{60, 120, 60} : cell_color(scene, values[static_cast<std::size_t>(i * pitch.grid_n + j)]);
      out << "<rect x=\"" << i * cw << "\" y=\"" << j * ch << "\" width=\"" << cw << "\" height=\"" << ch
          << "\" fill=\"" << hex(c) << "\"/>\n";
    }
  }
  out << "<rect width=\"" << pitch.length << "\" height=\"" << pitch.width
      << "\" fill=\"none\" stroke=\"#ffffff\" stroke-width=\"0.2\"/>\n";
  out << "<line x1=\"" << pitch.length / 2 << "\" y1=\"0\" x2=\"" << pitch.length / 2 << "\" y2=\"" << pitch.width
      << "\" stroke=\"#ffffff\" stroke-width=\"0.2\"/>\n";
  const double c = pitch.width / 2;
  out << "<line x1=\"-0.4\" y1=\"" << c - pitch.goal_half_width << "\" x2=\"-0.4\" y2=\"" << c + pitch.goal_half_width
      << "\" stroke=\"" << hex(kGoal) << "\" stroke-width=\"0.4\"/>\n";
  if (scene.state) {
    for (const auto& p : scene.state->players) {
      const Vec2 tip = p.position + p.velocity * kArrowSeconds;
      out << "<line x1=\"" << p.position.x << "\" y1=\"" << p.position.y << "\" x2=\"" << tip.x << "\" y2=\"" << tip.y
          << "\" stroke=\"" << hex(kArrow) << "\" stroke-width=\"0.25\"/>\n";
      const bool carrier = scene.state->ball.carrier && *scene.state->ball.carrier == p.id;
      out << "<circle cx=\"" << p.position.x << "\" cy=\"" << p.position.y << "\" r=\"" << kPlayerRadius
          << "\" fill=\"" << hex(team_color(p)) << "\"" << (carrier ? " stroke=\"#141414\" stroke-width=\"0.3\"" : "")
          << "/>\n";
    }
    out << "<circle cx=\"" << scene.state->ball.position.x << "\" cy=\"" << scene.state->ball.position.y
        << "\" r=\"0.4\" fill=\"" << hex(kBall) << "\"/>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

void render_to_file(const Scene& scene, const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".ppm") {
    write_ppm(rasterize(scene), path);
  } else if (ext == ".svg") {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write image: " + path.string());
    out << to_svg(scene);
  } else {
    throw FormatError("image output must end in .ppm or .svg: " + path.string());
  }
}

}  // namespace pitchrl
