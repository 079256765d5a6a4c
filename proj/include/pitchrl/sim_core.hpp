#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "pitchrl/state.hpp"

namespace pitchrl {

// Compass bearings for Move, counter-clockwise from +x (away from the
// defended goal).
enum class Bearing : std::uint8_t { E, NE, N, NW, W, SW, S, SE };

// Discrete defender action. Index layout: 0 = Stay, 1..8 = Move(E..SE),
// 9 = Press.
struct DefenderAction {
  enum class Kind : std::uint8_t { Stay, Move, Press };
  Kind kind = Kind::Stay;
  Bearing bearing = Bearing::E;

  static constexpr int kCount = 10;
  static DefenderAction stay() { return {}; }
  static DefenderAction move(Bearing b) { return {Kind::Move, b}; }
  static DefenderAction press() { return {Kind::Press, Bearing::E}; }
  static DefenderAction from_index(int index);
  int index() const;
  bool operator==(const DefenderAction&) const = default;
};

struct StepEvents {
  bool goal = false;
  bool out_of_bounds = false;
  bool turnover = false;
  bool tackle = false;  // a successful tackle
  bool foul = false;    // a failed tackle ruled a foul (ends as a turnover)
  bool terminal = false;
};

enum class CarrierOption : std::uint8_t { Dribble, Pass, Shoot };

struct CarrierDecision {
  CarrierOption option = CarrierOption::Dribble;
  CarrierOption greedy_option = CarrierOption::Dribble;
  std::optional<int> pass_target;  // attacker id, set for Pass
  bool greedy() const { return option == greedy_option; }
};

// What the scripted attackers do during one step.
struct AttackerPlan {
  std::vector<Vec2> velocities;                // one per attacker, player order
  std::vector<AttackerMemory> memory;          // updated bookkeeping
  std::optional<CarrierDecision> decision;     // set when the carrier decided this step
  std::optional<Vec2> kick_velocity;           // ball velocity for a pass or shot
  Vec2 kick_target{};
};

GameState reset(const ScenarioConfig& scenario, std::uint64_t seed);

// Advances `state` by one dt. Throws ActionArityError when the action count
// differs from n_defenders and SteppedTerminalError on a finished episode.
StepEvents step(GameState& state, std::span<const DefenderAction> actions);

// Probability that a scripted attacker takes the greedy option.
inline double greedy_probability(double difficulty) { return 0.5 + 0.5 * difficulty; }
// Standard deviation (radians) of pass and shot direction noise.
inline double direction_noise(double difficulty, const SimConstants& c) {
  return (1.0 - difficulty) * c.noise_max;
}

// Carrier choice among dribble / pass / shoot. Requires a carrier.
CarrierDecision decide_carrier(const GameState& state, double difficulty, std::mt19937_64& rng);

// Scripted behavior of every attacker for the next step.
AttackerPlan attacker_policy(const GameState& state, double difficulty, std::mt19937_64& rng);

// Flat observation: per player (defenders, goalkeeper, attackers) position
// and velocity, ball position and velocity, then a carrier one-hot. All
// entries lie in [-1, 1].
std::vector<double> observe(const GameState& state);
std::size_t observation_size(const ScenarioConfig& scenario);

// Per-agent view. Egocentric moves the agent's own player block to the
// front of the vector; Global returns observe(state).
enum class ObservationMode : std::uint8_t { Global, Egocentric };
std::vector<double> observe_agent(const GameState& state, int agent, ObservationMode mode);

}  // namespace pitchrl
