#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pitchrl/state.hpp"

namespace pitchrl {

// Logistic pass model p(x) = 1 / (1 + exp(-(x - offset) / temperature)).
struct PassModelParams {
  double sigma = 0.45;   // temperature, seconds
  double lambda = 0.0;   // offset, seconds

  void validate() const;
  bool operator==(const PassModelParams&) const = default;
};

// One Bernoulli pass trial: `x` is the arrival-time advantage of the
// intended receiver at the target, `k` is 1 for a completed pass.
struct PassEvent {
  double x = 0.0;
  int k = 0;
};

// m x n grid of attacking-team control probabilities, row-major in i (x)
// then j (y): value(i, j) = values[i * n + j].
struct ScalarField {
  PitchSpec spec{};
  std::vector<double> values;
  int step_index = 0;

  double at(int i, int j) const { return values[static_cast<std::size_t>(i * spec.grid_n + j)]; }
  double defending_at(int i, int j) const { return 1.0 - at(i, j); }
};

double pass_success_probability(const PassModelParams& params, double x);

// Mean log-likelihood of `events` and its gradient d/d(sigma, lambda).
double log_likelihood(const PassModelParams& params, std::span<const PassEvent> events);
std::array<double, 2> log_likelihood_gradient(const PassModelParams& params,
                                              std::span<const PassEvent> events);

struct FitOptions {
  double tol = 1e-8;   // on the gradient norm of the mean log-likelihood
  int max_iterations = 200;
};

// Maximum-likelihood fit of the pass model. Throws InsufficientData for an
// empty or single-class sample and NonConvergence when the iteration budget
// runs out (typically a perfectly separable sample).
PassModelParams fit_pass_model(std::span<const PassEvent> events, const PassModelParams& init,
                               const FitOptions& options = {});

// Synthetic events: x ~ Normal(x_mean, x_std), k ~ Bernoulli(p(x)).
std::vector<PassEvent> generate_pass_events(const PassModelParams& truth, std::size_t count,
                                            std::uint64_t seed, double x_mean = 0.0,
                                            double x_std = 0.6);

// CSV with header `x,k`.
std::vector<PassEvent> load_pass_events(const std::filesystem::path& path);
void save_pass_events(std::span<const PassEvent> events, const std::filesystem::path& path);

// Time for `player` to reach `target`: reaction time plus straight-line travel
// at top speed. A player with zero top speed (the lazy goalkeeper) only
// reaches its own spot.
double arrival_time(const PlayerState& player, Vec2 target);

// Attacking-team control probability at every cell center, using the best
// (earliest-arriving) player of each team.
ScalarField compute_control_field(const GameState& state, const PitchSpec& spec,
                                  const PassModelParams& params);

}  // namespace pitchrl
