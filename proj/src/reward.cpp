#include "pitchrl/reward.hpp"

#include <cmath>

#include "pitchrl/errors.hpp"

namespace pitchrl {

void RewardConfig::validate() const {
  if (!std::isfinite(shaping_weight) || shaping_weight < 0.0) {
    throw ConfigError("reward.shaping_weight must be finite and >= 0");
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("reward.gamma must be in (0, 1]");
}

double sparse_reward(const StepEvents& events) { return events.goal ? -1.0 : 0.0; }

double shaped_reward(double sparse, double epv_prev, double epv_curr, const RewardConfig& config) {
  const double w = config.shaping_weight;
  switch (config.mode) {
    case ShapingMode::Additive:
      return sparse - w * epv_curr;
    case ShapingMode::PotentialBased:
      return sparse + w * (config.gamma * (-epv_curr) - (-epv_prev));
  }
  return sparse;
}

}  // namespace pitchrl
