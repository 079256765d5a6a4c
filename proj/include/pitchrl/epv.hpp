#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "pitchrl/pitch_control.hpp"
#include "pitchrl/state.hpp"

namespace pitchrl {

// Expected possession value per cell: probability that an attacking
// possession with the ball in cell (i, j) eventually yields a goal.
// Row-major like ScalarField: values[i * n + j].
struct EPVGrid {
  int m = 0;
  int n = 0;
  std::vector<double> values;

  double at(int i, int j) const { return values[static_cast<std::size_t>(i * n + j)]; }
  bool operator==(const EPVGrid&) const = default;
};

// Direction slots of PossessionChain::move.
enum MoveSlot : int { kStay = 0, kPlusX = 1, kMinusX = 2, kPlusY = 3, kMinusY = 4 };

// Markov possession model on an m x n grid. Per cell:
// sum(move) + shot + turnover = 1, score_given_shot in [0, 1].
struct PossessionChain {
  int m = 0;
  int n = 0;
  std::vector<std::array<double, 5>> move;
  std::vector<double> shot;
  std::vector<double> score;
  std::vector<double> turnover;

  std::size_t cell(int i, int j) const { return static_cast<std::size_t>(i * n + j); }
  // Throws NonStochasticChain when any cell leaves the simplex or moves off-grid.
  void validate(double tolerance = 1e-9) const;
};

struct SolveOptions {
  double tol = 1e-8;
  int max_sweeps = 1'000'000;
};

// Value iteration V <- shot * score + sum_c' move(c -> c') V(c') from V = 0,
// until the sup-norm change between sweeps is <= tol.
EPVGrid solve_epv(const PossessionChain& chain, const SolveOptions& options = {});

struct DefaultChainParams {
  double shot_max = 0.9;
  double shot_scale = 12.0;  // meters
  double turnover = 0.04;
  double score_min = 0.02;
  double score_max = 0.35;
};

// Synthetic open-play possession model biased toward the defended goal.
PossessionChain default_chain(const PitchSpec& spec, const DefaultChainParams& params = {});

// Sum over cells of EPV times attacking control. Throws DimensionMismatch when
// the field and grid differ in shape.
double game_state_epv(const ScalarField& field, const EPVGrid& grid);

// Versioned JSON {version, m, n, values}. load_epv throws FormatError on
// arity, dimension or range violations.
void save_epv(const EPVGrid& grid, const std::filesystem::path& path);
EPVGrid load_epv(const std::filesystem::path& path);

}  // namespace pitchrl
