#pragma once

#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pitchrl/state.hpp"

namespace fixtures {

inline pitchrl::PlayerState player(int id, pitchrl::Team team, pitchrl::Vec2 at, double max_speed = 8.0,
                                   double reaction = 0.5) {
  pitchrl::PlayerState p;
  p.id = id;
  p.team = team;
  p.position = at;
  p.max_speed = max_speed;
  p.reaction_time = reaction;
  return p;
}

// Hand-placed state in simulator layout: defenders, lazy goalkeeper on the
// goal line, attackers. `carrier` indexes into `attackers`.
inline pitchrl::GameState hand_state(pitchrl::ScenarioConfig scenario, const std::vector<pitchrl::Vec2>& defenders,
                                     const std::vector<pitchrl::Vec2>& attackers,
                                     std::optional<int> carrier = 0, std::uint64_t seed = 1) {
  using namespace pitchrl;
  scenario.n_defenders = static_cast<int>(defenders.size());
  scenario.n_attackers = static_cast<int>(attackers.size());
  GameState s;
  s.scenario = scenario;
  s.rng.seed(seed);
  const auto& c = scenario.constants;
  int id = 0;
  for (auto d : defenders) s.players.push_back(player(id++, Team::Defending, d, c.defender_max_speed));
  auto keeper = player(id++, Team::Defending, scenario.pitch.goal_center(), 0.0);
  keeper.role = Role::LazyGoalkeeper;
  s.players.push_back(keeper);
  for (auto a : attackers) {
    s.players.push_back(player(id++, Team::Attacking, a, c.attacker_max_speed));
    s.attackers.push_back({c.decision_period, a});
  }
  if (carrier) {
    s.ball.carrier = s.first_attacker_index() + *carrier;
    s.ball.position = s.players[static_cast<std::size_t>(*s.ball.carrier)].position;
  }
  return s;
}

// Fresh, empty scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("pitchrl-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures
