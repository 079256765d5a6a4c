#include <doctest.h>

#include <cmath>
#include <random>

#include "pitchrl/errors.hpp"
#include "pitchrl/reward.hpp"

using namespace pitchrl;

TEST_CASE("sparse reward") {
  StepEvents goal;
  goal.goal = goal.terminal = true;
  CHECK(sparse_reward(goal) == -1.0);
  StepEvents out;
  out.out_of_bounds = out.terminal = true;
  CHECK(sparse_reward(out) == 0.0);
  CHECK(sparse_reward(StepEvents{}) == 0.0);
}

TEST_CASE("shaped reward formulas") {
  RewardConfig additive{1.0, ShapingMode::Additive, 0.99};
  CHECK(shaped_reward(0.0, 0.1, 0.25, additive) == -0.25);
  CHECK(shaped_reward(-1.0, 0.1, 0.25, additive) == -1.25);

  for (auto mode : {ShapingMode::Additive, ShapingMode::PotentialBased}) {
    RewardConfig zero{0.0, mode, 0.9};
    CHECK(shaped_reward(-1.0, 3.0, 7.0, zero) == -1.0);
    CHECK(shaped_reward(0.0, 3.0, 7.0, zero) == 0.0);
  }

  RewardConfig potential{0.5, ShapingMode::PotentialBased, 1.0};
  CHECK(shaped_reward(-1.0, 4.2, 4.2, potential) == -1.0);
  potential.gamma = 0.9;
  CHECK(shaped_reward(0.0, 2.0, 1.0, potential) == doctest::Approx(0.5 * (-0.9 + 2.0)));
}

TEST_CASE("additive shaping prefers lower EPV") {
  RewardConfig c{0.1, ShapingMode::Additive, 0.99};
  CHECK(shaped_reward(0.0, 5.0, 6.0, c) < shaped_reward(0.0, 5.0, 5.9, c));
}

TEST_CASE("potential shaping telescopes over an episode") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> epv(0.0, 9.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double gamma = 0.8 + 0.2 * (trial % 5) / 4.0;
    const RewardConfig c{0.3, ShapingMode::PotentialBased, gamma};
    const int T = 5 + trial;
    std::vector<double> e(static_cast<std::size_t>(T + 1));
    for (auto& v : e) v = epv(rng);
    double discounted = 0.0;
    for (int t = 0; t < T; ++t) discounted += std::pow(gamma, t) * shaped_reward(0.0, e[t], e[t + 1], c);
    const double phi_0 = -c.shaping_weight * e[0];
    const double phi_T = -c.shaping_weight * e[static_cast<std::size_t>(T)];
    CHECK(discounted == doctest::Approx(std::pow(gamma, T) * phi_T - phi_0).epsilon(1e-12));
  }
}

TEST_CASE("reward config validation") {
  CHECK_THROWS_AS((RewardConfig{-0.1, ShapingMode::Additive, 0.99}.validate()), ConfigError);
  CHECK_THROWS_AS((RewardConfig{0.1, ShapingMode::Additive, 0.0}.validate()), ConfigError);
  CHECK_NOTHROW((RewardConfig{0.0, ShapingMode::PotentialBased, 1.0}.validate()));
}
