#include "pitchrl/epv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

#include <json.hpp>

#include "pitchrl/errors.hpp"

namespace pitchrl {

namespace {

constexpr int kEpvFileVersion = 1;

bool in_grid(int i, int j, int m, int n) { return i >= 0 && i < m && j >= 0 && j < n; }

std::array<std::pair<int, int>, 5> neighbours(int i, int j) {
  return {{{i, j}, {i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}}};
}

// Angle subtended by the goal mouth from p.
double goal_angle(Vec2 p, const PitchSpec& spec) {
  const double dy = p.y - spec.width / 2.0;
  const double g = spec.goal_half_width;
  return std::atan2(2.0 * g * p.x, p.x * p.x + dy * dy - g * g);
}

}  // namespace

void PossessionChain::validate(double tolerance) const {
  const auto cells = static_cast<std::size_t>(m) * static_cast<std::size_t>(n);
  if (m < 1 || n < 1 || move.size() != cells || shot.size() != cells || score.size() != cells ||
      turnover.size() != cells) {
    throw NonStochasticChain("possession chain arrays do not match its m x n shape");
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto c = cell(i, j);
      double total = shot[c] + turnover[c];
      bool ok = shot[c] >= 0.0 && turnover[c] >= 0.0 && score[c] >= 0.0 && score[c] <= 1.0;
      const auto nb = neighbours(i, j);
      for (int k = 0; k < 5; ++k) {
        const double p = move[c][static_cast<std::size_t>(k)];
        ok = ok && p >= 0.0;
        if (p > 0.0 && !in_grid(nb[static_cast<std::size_t>(k)].first,
                                nb[static_cast<std::size_t>(k)].second, m, n)) {
          ok = false;
        }
        total += p;
      }
      if (!ok || std::abs(total - 1.0) > tolerance) {
        throw NonStochasticChain("cell (" + std::to_string(i) + "," + std::to_string(j) +
                                 ") violates the probability simplex");
      }
    }
  }
}

EPVGrid solve_epv(const PossessionChain& chain, const SolveOptions& options) {
  chain.validate();
  if (!(options.tol > 0.0)) throw ConfigError("solve_epv: tol must be > 0");
  const int m = chain.m;
  const int n = chain.n;
  std::vector<double> v(static_cast<std::size_t>(m * n), 0.0);
  std::vector<double> next(v.size());
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    double change = 0.0;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) {
        const auto c = chain.cell(i, j);
        double value = chain.shot[c] * chain.score[c];
        const auto nb = neighbours(i, j);
        for (std::size_t k = 0; k < 5; ++k) {
          const double p = chain.move[c][k];
          if (p > 0.0) value += p * v[chain.cell(nb[k].first, nb[k].second)];
        }
        value = std::clamp(value, 0.0, 1.0);
        change = std::max(change, std::abs(value - v[c]));
        next[c] = value;
      }
    }
    v.swap(next);
    if (change <= options.tol) return {m, n, std::move(v)};
  }
  throw NonConvergence("solve_epv: residual above tolerance after " +
                       std::to_string(options.max_sweeps) + " sweeps");
}

PossessionChain default_chain(const PitchSpec& spec, const DefaultChainParams& params) {
  spec.validate();
  const int m = spec.grid_m;
  const int n = spec.grid_n;
  PossessionChain chain;
  chain.m = m;
  chain.n = n;
  const auto cells = static_cast<std::size_t>(m * n);
  chain.move.resize(cells);
  chain.shot.resize(cells);
  chain.score.resize(cells);
  chain.turnover.resize(cells);

  double max_angle = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) max_angle = std::max(max_angle, goal_angle(spec.cell_center(i, j), spec));
  }

  const double mid = (n - 1) / 2.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto c = chain.cell(i, j);
      const Vec2 centre = spec.cell_center(i, j);
      const double d_goal = distance(centre, spec.goal_center());
      chain.shot[c] = params.shot_max * std::exp(-d_goal / params.shot_scale);
      chain.score[c] = params.score_min +
                       (params.score_max - params.score_min) * goal_angle(centre, spec) / max_angle;
      chain.turnover[c] = params.turnover;

      // Weights: toward goal (-x) strongest, toward the long axis preferred.
      std::array<double, 5> w{};
      w[kStay] = 1.0;
      w[kPlusX] = i + 1 < m ? 0.5 : 0.0;
      w[kMinusX] = i > 0 ? 3.0 : 0.0;
      const double toward_axis_up = j < mid ? 1.5 : 1.0;    // +y moves toward the axis
      const double toward_axis_down = j > mid ? 1.5 : 1.0;  // -y moves toward the axis
      w[kPlusY] = j + 1 < n ? toward_axis_up : 0.0;
      w[kMinusY] = j > 0 ? toward_axis_down : 0.0;
      double total = 0.0;
      for (double x : w) total += x;
      const double mass = 1.0 - chain.shot[c] - chain.turnover[c];
      for (std::size_t k = 0; k < 5; ++k) chain.move[c][k] = mass * w[k] / total;
    }
  }
  return chain;
}

double game_state_epv(const ScalarField& field, const EPVGrid& grid) {
  if (field.spec.grid_m != grid.m || field.spec.grid_n != grid.n ||
      field.values.size() != grid.values.size()) {
    throw DimensionMismatch("game_state_epv: field is " + std::to_string(field.spec.grid_m) + "x" +
                            std::to_string(field.spec.grid_n) + ", EPV grid is " +
                            std::to_string(grid.m) + "x" + std::to_string(grid.n));
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < grid.values.size(); ++k) sum += grid.values[k] * field.values[k];
  return sum;
}

void save_epv(const EPVGrid& grid, const std::filesystem::path& path) {
  nlohmann::json j{{"version", kEpvFileVersion}, {"m", grid.m}, {"n", grid.n}, {"values", grid.values}};
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write EPV grid: " + path.string());
  out << j.dump() << '\n';
}

EPVGrid load_epv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open EPV grid: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("EPV grid " + path.string() + " is not valid JSON: " + e.what());
  }
  EPVGrid grid;
  try {
    if (j.at("version").get<int>() != kEpvFileVersion) {
      throw FormatError("EPV grid " + path.string() + ": unsupported version");
    }
    grid.m = j.at("m").get<int>();
    grid.n = j.at("n").get<int>();
    grid.values = j.at("values").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("EPV grid " + path.string() + ": " + e.what());
  }
  if (grid.m < 1 || grid.n < 1 ||
      grid.values.size() != static_cast<std::size_t>(grid.m) * static_cast<std::size_t>(grid.n)) {
    throw FormatError("EPV grid " + path.string() + ": expected m*n values");
  }
  for (double v : grid.values) {
    if (!(v >= 0.0 && v <= 1.0)) throw FormatError("EPV grid " + path.string() + ": value outside [0,1]");
  }
  return grid;
}

}  // namespace pitchrl
