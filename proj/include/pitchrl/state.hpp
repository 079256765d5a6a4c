#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "pitchrl/geometry.hpp"

namespace pitchrl {

// Pitch geometry and the resolution of the control / EPV grids.
// The defended goal sits on the line x = 0, centered at y = width / 2.
struct PitchSpec {
  double length = 105.0;
  double width = 68.0;
  int grid_m = 32;  // cells along x
  int grid_n = 20;  // cells along y
  double goal_half_width = 3.66;

  void validate() const;
  Vec2 goal_center() const { return {0.0, width / 2.0}; }
  Vec2 cell_center(int i, int j) const {
    return {(i + 0.5) * length / grid_m, (j + 0.5) * width / grid_n};
  }
  bool contains(Vec2 p) const {
    return p.x >= 0.0 && p.x <= length && p.y >= 0.0 && p.y <= width;
  }
  Vec2 clamp(Vec2 p) const;
  bool operator==(const PitchSpec&) const = default;
};

// Physical and behavioral constants of the simulator. Defaults are
// real-football magnitudes.
struct SimConstants {
  double defender_max_speed = 8.0;
  double attacker_max_speed = 7.5;
  double dribble_speed = 6.5;
  double reaction_time = 0.5;

  double tackle_radius = 1.5;
  double tackle_success = 0.25;
  double foul_probability = 0.1;  // of a failed tackle
  double beaten_time = 1.0;       // a defender whose tackle fails is frozen this long

  double press_radius = 4.0;      // carrier feels pressure inside this distance
  double scoring_zone = 20.0;     // shoot greedily inside this distance of the goal line
  double shooting_range = 32.0;   // shooting is an available option inside this distance
  double pass_speed = 16.0;
  double shot_speed = 25.0;
  double noise_max = 0.3;         // radians, at difficulty 0
  double control_radius = 1.0;    // receive / intercept distance
  double intercept_probability = 0.7;
  double block_probability = 0.5;
  double keeper_reach = 1.0;
  double loose_ball_decay = 0.9;  // per-step speed factor of an unplayed ball
  int decision_period = 5;        // steps between carrier / runner decisions

  bool operator==(const SimConstants&) const = default;
};

struct ScenarioConfig {
  int n_defenders = 4;  // controllable, goalkeeper excluded
  int n_attackers = 6;
  double difficulty = 0.95;
  int max_episode_steps = 400;
  double dt = 0.1;
  PitchSpec pitch{};
  SimConstants constants{};

  void validate() const;
  bool operator==(const ScenarioConfig&) const = default;
};

enum class Team : std::uint8_t { Defending, Attacking };
enum class Role : std::uint8_t { Outfield, LazyGoalkeeper };

struct PlayerState {
  int id = 0;
  Team team = Team::Defending;
  Role role = Role::Outfield;
  Vec2 position{};
  Vec2 velocity{};
  double max_speed = 0.0;
  double reaction_time = 0.5;
  int frozen_steps = 0;  // > 0 while a beaten defender recovers

  bool operator==(const PlayerState&) const = default;
};

enum class FlightKind : std::uint8_t { None, Pass, Shot, Loose };

struct BallState {
  Vec2 position{};
  Vec2 velocity{};
  std::optional<int> carrier;  // player id
  FlightKind flight = FlightKind::None;
  std::optional<int> receiver;  // intended receiver of a pass
  std::optional<int> kicker;    // last player to kick it; cannot collect their own pass
  Vec2 target{};                // where a pass is aimed

  bool operator==(const BallState&) const = default;
};

enum class Outcome : std::uint8_t { GoalConceded, OutOfBounds, Turnover, StepLimit };

struct EpisodeOutcome {
  Outcome kind = Outcome::StepLimit;
  int goal_difference = 0;  // defending goals - attacking goals

  bool operator==(const EpisodeOutcome&) const = default;
};

struct ScoreEvent {
  int step = 0;
  Team team = Team::Attacking;
  bool operator==(const ScoreEvent&) const = default;
};

// Scripted-attacker bookkeeping that persists between steps.
struct AttackerMemory {
  int decision_timer = 0;
  Vec2 run_target{};
  bool operator==(const AttackerMemory&) const = default;
};

// Complete simulator snapshot. Players are ordered: controllable defenders
// (ids 0..n_defenders-1), the lazy goalkeeper, then the attackers. Player
// id equals its index in `players`.
struct GameState {
  ScenarioConfig scenario{};
  std::vector<PlayerState> players;
  BallState ball{};
  int step_index = 0;
  std::mt19937_64 rng;
  std::vector<ScoreEvent> score_events;
  std::vector<AttackerMemory> attackers;  // one per attacker, in player order
  std::optional<EpisodeOutcome> outcome;  // set once terminal

  bool terminal() const { return outcome.has_value(); }
  int goalkeeper_index() const { return scenario.n_defenders; }
  int first_attacker_index() const { return scenario.n_defenders + 1; }
  const PlayerState* carrier() const {
    return ball.carrier ? &players[static_cast<std::size_t>(*ball.carrier)] : nullptr;
  }

  bool operator==(const GameState&) const = default;
};

}  // namespace pitchrl
