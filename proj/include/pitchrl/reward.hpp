#pragma once

#include "pitchrl/sim_core.hpp"

namespace pitchrl {

enum class ShapingMode { Additive, PotentialBased };

struct RewardConfig {
  double shaping_weight = 0.1;
  ShapingMode mode = ShapingMode::Additive;
  double gamma = 0.99;

  void validate() const;
};

// Team reward from the outcome of one step: -1 when a goal is conceded.
double sparse_reward(const StepEvents& events);

// Adds the game-state EPV signal to the sparse reward. Lower EPV is better
// for the defenders, so the potential is -EPV:
//   Additive:       sparse - w * epv_curr
//   PotentialBased: sparse + w * (gamma * (-epv_curr) - (-epv_prev))
double shaped_reward(double sparse, double epv_prev, double epv_curr, const RewardConfig& config);

}  // namespace pitchrl
