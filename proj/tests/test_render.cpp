#include <doctest.h>

#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "pitchrl/epv.hpp"
#include "pitchrl/errors.hpp"
#include "pitchrl/pitch_control.hpp"
#include "pitchrl/render.hpp"

using namespace pitchrl;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::array<int, 2> cell_pixel(const PitchSpec& spec, int i, int j) { return to_pixel(spec.cell_center(i, j)); }

}  // namespace

TEST_CASE("color scales") {
  CHECK(diverging_color(0.5) == Rgb{255, 255, 255});
  CHECK(diverging_color(0.0) == Rgb{33, 102, 172});
  CHECK(diverging_color(1.0) == Rgb{178, 24, 43});
  CHECK(sequential_color(0.0) == Rgb{0, 0, 4});
  CHECK(sequential_color(1.0) == Rgb{252, 253, 191});
}

TEST_CASE("symmetric 1v1 renders an even split on the halfway line") {
  ScenarioConfig sc;
  sc.pitch.grid_m = 33;  // odd, so a column of cells sits on the halfway line
  const double half = sc.pitch.length / 2;
  auto s = fixtures::hand_state(sc, {{half - 10.0, 20.0}}, {{half + 10.0, 20.0}}, std::nullopt);
  s.players.erase(s.players.begin() + 1);  // drop the keeper
  s.players.back().max_speed = s.players.front().max_speed;
  for (std::size_t k = 0; k < s.players.size(); ++k) s.players[k].id = static_cast<int>(k);
  const auto field = compute_control_field(s, sc.pitch, {});
  const int m = sc.pitch.grid_m;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < sc.pitch.grid_n; ++j) {
      CHECK(field.at(i, j) + field.at(m - 1 - i, j) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  Scene scene{sc.pitch, field.values, ColorScale::Diverging, s};
  const Image img = rasterize(scene);
  const auto p = cell_pixel(sc.pitch, 16, 15);
  CHECK(field.at(16, 15) == 0.5);
  CHECK(img.pixel(p[0] + 2, p[1]) == diverging_color(0.5));
}

TEST_CASE("EPV render is brightest at the goal mouth") {
  PitchSpec spec;
  const auto grid = solve_epv(default_chain(spec));
  const Image img = rasterize({spec, grid.values, ColorScale::Sequential, std::nullopt});
  Rgb brightest{0, 0, 0};
  int best_i = -1, best_j = -1;
  for (int i = 0; i < spec.grid_m; ++i) {
    for (int j = 0; j < spec.grid_n; ++j) {
      const auto p = cell_pixel(spec, i, j);
      const Rgb c = img.pixel(p[0], p[1]);
      if (c[0] + c[1] + c[2] > brightest[0] + brightest[1] + brightest[2]) {
        brightest = c;
        best_i = i;
        best_j = j;
      }
    }
  }
  CHECK(brightest == sequential_color(1.0));
  CHECK(best_i == 0);
  CHECK(std::abs(spec.cell_center(best_i, best_j).y - spec.width / 2) < spec.goal_half_width);
}

TEST_CASE("rendering is deterministic and format-checked") {
  const auto dir = fixtures::scratch_dir("render");
  ScenarioConfig sc;
  auto s = fixtures::hand_state(sc, {{30, 30}, {40, 44}}, {{55, 34}, {60, 20}});
  s.players[0].velocity = {3.0, -2.0};
  const auto field = compute_control_field(s, sc.pitch, {});
  const Scene scene{sc.pitch, field.values, ColorScale::Diverging, s};
  render_to_file(scene, dir / "a.ppm");
  render_to_file(scene, dir / "b.ppm");
  CHECK(slurp(dir / "a.ppm") == slurp(dir / "b.ppm"));
  CHECK(slurp(dir / "a.ppm").rfind("P6\n", 0) == 0);
  render_to_file(scene, dir / "a.svg");
  render_to_file(scene, dir / "b.svg");
  CHECK(slurp(dir / "a.svg") == slurp(dir / "b.svg"));
  CHECK(slurp(dir / "a.svg").find("<svg") != std::string::npos);
  CHECK_THROWS_AS(render_to_file(scene, dir / "a.png"), FormatError);

  Scene wrong = scene;
  wrong.field.pop_back();
  CHECK_THROWS_AS(rasterize(wrong), DimensionMismatch);
}
