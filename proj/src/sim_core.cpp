#include "pitchrl/sim_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pitchrl/errors.hpp"
#include "pitchrl/pitch_control.hpp"

namespace pitchrl {

void PitchSpec::validate() const {
  if (!(length > 0.0)) throw ConfigError("pitch.length must be > 0");
  if (!(width > 0.0)) throw ConfigError("pitch.width must be > 0");
  if (grid_m < 2) throw ConfigError("pitch.grid_m must be >= 2");
  if (grid_n < 2) throw ConfigError("pitch.grid_n must be >= 2");
  if (!(goal_half_width > 0.0) || !(goal_half_width < width / 2.0)) {
    throw ConfigError("pitch.goal_half_width must be in (0, width/2)");
  }
}

Vec2 PitchSpec::clamp(Vec2 p) const {
  return {std::clamp(p.x, 0.0, length), std::clamp(p.y, 0.0, width)};
}

void ScenarioConfig::validate() const {
  if (n_defenders < 1) throw ConfigError("scenario.n_defenders must be >= 1");
  if (n_attackers < 1) throw ConfigError("scenario.n_attackers must be >= 1");
  if (!(difficulty >= 0.0 && difficulty <= 1.0)) {
    throw ConfigError("scenario.difficulty must be in [0, 1]");
  }
  if (max_episode_steps < 1) throw ConfigError("scenario.max_episode_steps must be >= 1");
  if (!(dt > 0.0)) throw ConfigError("scenario.dt must be > 0");
  pitch.validate();
  if (constants.decision_period < 1) throw ConfigError("scenario.constants.decision_period must be >= 1");
}

DefenderAction DefenderAction::from_index(int index) {
  if (index == 0) return stay();
  if (index >= 1 && index <= 8) return move(static_cast<Bearing>(index - 1));
  if (index == 9) return press();
  throw ShapeMismatch("defender action index out of range: " + std::to_string(index));
}

int DefenderAction::index() const {
  switch (kind) {
    case Kind::Stay:
      return 0;
    case Kind::Move:
      return 1 + static_cast<int>(bearing);
    case Kind::Press:
      return 9;
  }
  return 0;
}

namespace {

constexpr double kSafePassProbability = 0.5;
constexpr int kPressedDecisionSteps = 2;
constexpr double kMaxPassLength = 35.0;

Vec2 bearing_vector(Bearing b) {
  const double angle = static_cast<double>(static_cast<int>(b)) * std::numbers::pi / 4.0;
  return {std::cos(angle), std::sin(angle)};
}

Vec2 rotate(Vec2 v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

// Velocity that moves from `from` toward `to` at `speed` without overshooting.
Vec2 seek(Vec2 from, Vec2 to, double speed, double dt) {
  const Vec2 d = to - from;
  const double dist = d.norm();
  if (dist < 1e-9) return {};
  const double v = std::min(speed, dist / dt);
  return unit(d) * v;
}

bool is_outfield_defender(const PlayerState& p) {
  return p.team == Team::Defending && p.role == Role::Outfield;
}

double nearest_defender_distance(const GameState& s, Vec2 at) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : s.players) {
    if (is_outfield_defender(p)) best = std::min(best, distance(p.position, at));
  }
  return best;
}

double defending_arrival(const GameState& s, Vec2 at) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : s.players) {
    if (p.team == Team::Defending) best = std::min(best, arrival_time(p, at));
  }
  return best;
}

// Distance from the nearest defender to the passing lane. The first couple of
// metres are skipped: a marker at the passer's shoulder cannot cut the ball out.
double lane_clearance(const GameState& s, Vec2 from, Vec2 to) {
  from = from + unit(to - from) * std::min(2.0, distance(from, to));
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : s.players) {
    if (p.team == Team::Defending) best = std::min(best, distance_to_segment(p.position, from, to));
  }
  return best;
}

// Likelihood that a pass to `mate` arrives, discounted by defenders in the lane.
double pass_quality(const GameState& s, const PlayerState& carrier, const PlayerState& mate) {
  const PassModelParams model{};
  const double advantage = defending_arrival(s, mate.position) - mate.reaction_time;
  double p = pass_success_probability(model, advantage);
  const double lane = lane_clearance(s, carrier.position, mate.position);
  if (lane < 2.0) p *= lane / 2.0;
  return p;
}

struct PassChoice {
  std::optional<int> target;
  double probability = 0.0;
  double score = -1.0;
};

PassChoice best_pass(const GameState& s, const PlayerState& carrier) {
  PassChoice best;
  for (std::size_t k = static_cast<std::size_t>(s.first_attacker_index()); k < s.players.size(); ++k) {
    const auto& mate = s.players[k];
    if (mate.id == carrier.id) continue;
    if (distance(mate.position, carrier.position) > kMaxPassLength) continue;
    const double p = pass_quality(s, carrier, mate);
    const double progress = std::clamp((carrier.position.x - mate.position.x) / 20.0, -1.0, 1.0);
    const double score = p * (1.0 + 0.5 * progress);
    if (score > best.score) best = {mate.id, p, score};
  }
  return best;
}

Vec2 shot_aim(const GameState& s, Vec2 from) {
  const auto& pitch = s.scenario.pitch;
  const double c = pitch.width / 2.0;
  const double offset = pitch.goal_half_width - 0.5;
  return {0.0, from.y > c ? c - offset : c + offset};
}

Vec2 noisy_kick(Vec2 from, Vec2 aim, double speed, double sigma, std::mt19937_64& rng) {
  Vec2 dir = unit(aim - from);
  if (sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, sigma);
    dir = rotate(dir, noise(rng));
  }
  return dir * speed;
}

Vec2 dribble_velocity(const GameState& s, const PlayerState& carrier) {
  const auto& c = s.scenario.constants;
  Vec2 dir = unit(s.scenario.pitch.goal_center() - carrier.position);
  const PlayerState* nearest = nullptr;
  double nearest_d = 8.0;
  for (const auto& p : s.players) {
    if (!is_outfield_defender(p)) continue;
    const double d = distance(p.position, carrier.position);
    if (d < nearest_d) {
      nearest_d = d;
      nearest = &p;
    }
  }
  if (nearest != nullptr) {
    const Vec2 away = unit(carrier.position - nearest->position);
    dir = unit(dir + away * (0.8 * (8.0 - nearest_d) / 8.0));
  }
  return dir * c.dribble_speed;
}

// Open-space run target for an off-ball attacker.
Vec2 choose_run_target(const GameState& s, const PlayerState& runner, double difficulty,
                       std::mt19937_64& rng) {
  const auto& pitch = s.scenario.pitch;
  const PassModelParams model{};
  std::vector<Vec2> candidates{runner.position};
  for (int b = 0; b < 8; ++b) {
    candidates.push_back(runner.position + bearing_vector(static_cast<Bearing>(b)) * 8.0);
  }
  for (auto& c : candidates) {
    c = pitch.clamp(c);
    c.x = std::max(c.x, 5.0);
  }
  const double carrier_x = s.ball.position.x;
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const Vec2 c = candidates[k];
    const double control =
        pass_success_probability(model, defending_arrival(s, c) - arrival_time(runner, c));
    double score = control * (1.0 + 1.5 * (1.0 - c.x / pitch.length));
    for (std::size_t m = static_cast<std::size_t>(s.first_attacker_index()); m < s.players.size(); ++m) {
      const auto& mate = s.players[m];
      if (mate.id != runner.id && distance(mate.position, c) < 8.0) score -= 0.5;
    }
    if (c.x > carrier_x + 15.0) score -= 1.0;
    if (score > best_score) {
      best_score = score;
      best = k;
    }
  }
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) >= greedy_probability(difficulty)) {
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    best = pick(rng);
  }
  return candidates[best];
}

void finish(GameState& s, StepEvents& ev, Outcome kind) {
  ev.terminal = true;
  int gd = 0;
  switch (kind) {
    case Outcome::GoalConceded:
      ev.goal = true;
      gd = -1;
      s.score_events.push_back({s.step_index, Team::Attacking});
      break;
    case Outcome::OutOfBounds:
      ev.out_of_bounds = true;
      break;
    case Outcome::Turnover:
      ev.turnover = true;
      break;
    case Outcome::StepLimit:
      break;
  }
  s.outcome = EpisodeOutcome{kind, gd};
}

// Moves the ball along its flight path for one step and resolves
// interceptions, receptions and the goal line.
void advance_ball(GameState& s, StepEvents& ev) {
  auto& ball = s.ball;
  const auto& c = s.scenario.constants;
  const auto& pitch = s.scenario.pitch;
  const double dt = s.scenario.dt;
  const Vec2 from = ball.position;
  Vec2 to = from + ball.velocity * dt;
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  // Pass arrival: stop the ball on the target when it would overshoot.
  bool arrived = false;
  if (ball.flight == FlightKind::Pass && distance(from, ball.target) <= ball.velocity.norm() * dt) {
    to = ball.target;
    arrived = true;
  }

  // Goal line crossing.
  if (to.x <= 0.0) {
    const double t = from.x / (from.x - to.x);
    const Vec2 cross = from + (to - from) * t;
    to = cross;
  }

  for (const auto& p : s.players) {
    if (p.team != Team::Defending || p.frozen_steps > 0) continue;
    const double reach = p.role == Role::LazyGoalkeeper ? c.keeper_reach : c.control_radius;
    if (distance_to_segment(p.position, from, to) > reach) continue;
    double chance = 1.0;
    if (ball.flight == FlightKind::Pass) chance = c.intercept_probability;
    if (ball.flight == FlightKind::Shot && p.role == Role::Outfield) chance = c.block_probability;
    if (coin(s.rng) < chance) {
      ball.position = to;
      ball.velocity = {};
      ball.flight = FlightKind::None;
      finish(s, ev, Outcome::Turnover);
      return;
    }
  }

  ball.position = to;
  if (to.x <= 0.0) {
    const bool in_mouth = std::abs(to.y - pitch.width / 2.0) < pitch.goal_half_width;
    finish(s, ev, in_mouth ? Outcome::GoalConceded : Outcome::OutOfBounds);
    return;
  }
  if (!pitch.contains(to)) {
    finish(s, ev, Outcome::OutOfBounds);
    return;
  }

  // Attackers collect passes and loose balls.
  if (ball.flight == FlightKind::Pass || ball.flight == FlightKind::Loose) {
    const PlayerState* taker = nullptr;
    double taker_d = std::numeric_limits<double>::infinity();
    for (const auto& p : s.players) {
      if (p.team != Team::Attacking) continue;
      if (ball.flight == FlightKind::Pass && ball.kicker == p.id) continue;
      const double d = distance_to_segment(p.position, from, to);
      const double reach = arrived && ball.receiver == p.id ? 2.0 * c.control_radius : c.control_radius;
      if (d <= reach && d < taker_d) {
        taker = &p;
        taker_d = d;
      }
    }
    if (taker != nullptr) {
      ball.carrier = taker->id;
      ball.position = taker->position;
      ball.velocity = {};
      ball.flight = FlightKind::None;
      ball.receiver.reset();
      ball.kicker.reset();
      auto& mem = s.attackers[static_cast<std::size_t>(taker->id - s.first_attacker_index())];
      mem.decision_timer = c.decision_period;
      return;
    }
  }

  if (arrived) {
    ball.flight = FlightKind::Loose;
    ball.receiver.reset();
  }
  if (ball.flight == FlightKind::Loose) {
    ball.velocity = ball.velocity * c.loose_ball_decay;
    if (ball.velocity.norm() < 0.5) ball.velocity = {};
  }
}

}  // namespace

GameState reset(const ScenarioConfig& scenario, std::uint64_t seed) {
  scenario.validate();
  GameState s;
  s.scenario = scenario;
  s.rng.seed(seed);
  const auto& pitch = scenario.pitch;
  const auto& c = scenario.constants;
  std::uniform_real_distribution<double> jitter(-2.0, 2.0);
  const double half = pitch.length / 2.0;

  int id = 0;
  for (int k = 0; k < scenario.n_defenders; ++k, ++id) {
    PlayerState p;
    p.id = id;
    p.team = Team::Defending;
    p.max_speed = c.defender_max_speed;
    p.reaction_time = c.reaction_time;
    const double y = pitch.width * (k + 1.0) / (scenario.n_defenders + 1.0);
    const double x = 0.25 * pitch.length + (k % 2 == 0 ? 0.0 : 8.0);
    p.position = pitch.clamp({x + jitter(s.rng), y + jitter(s.rng)});
    s.players.push_back(p);
  }
  {
    PlayerState keeper;
    keeper.id = id++;
    keeper.team = Team::Defending;
    keeper.role = Role::LazyGoalkeeper;
    keeper.max_speed = 0.0;
    keeper.reaction_time = c.reaction_time;
    keeper.position = pitch.goal_center();
    s.players.push_back(keeper);
  }
  for (int k = 0; k < scenario.n_attackers; ++k, ++id) {
    PlayerState p;
    p.id = id;
    p.team = Team::Attacking;
    p.max_speed = c.attacker_max_speed;
    p.reaction_time = c.reaction_time;
    if (k == 0) {
      p.position = {half, pitch.width / 2.0};
    } else {
      const double y = pitch.width * k / static_cast<double>(scenario.n_attackers);
      const double x = half + 4.0 + 6.0 * ((k - 1) % 2);
      p.position = pitch.clamp({x + jitter(s.rng), y + jitter(s.rng)});
    }
    s.players.push_back(p);
    s.attackers.push_back({c.decision_period, p.position});
  }
  s.ball.carrier = s.first_attacker_index();
  s.ball.position = s.players[static_cast<std::size_t>(s.first_attacker_index())].position;
  return s;
}

CarrierDecision decide_carrier(const GameState& s, double difficulty, std::mt19937_64& rng) {
  const PlayerState* carrier = s.carrier();
  if (carrier == nullptr) throw ConfigError("decide_carrier: no ball carrier");
  const auto& c = s.scenario.constants;
  const Vec2 goal = s.scenario.pitch.goal_center();
  const double to_goal = distance(carrier->position, goal);
  const PassChoice pass = best_pass(s, *carrier);

  std::vector<CarrierOption> available{CarrierOption::Dribble};
  if (pass.target) available.push_back(CarrierOption::Pass);
  if (to_goal <= c.shooting_range) available.push_back(CarrierOption::Shoot);

  CarrierDecision d;
  const bool in_zone = carrier->position.x <= c.scoring_zone && to_goal <= c.shooting_range;
  const bool pressured = nearest_defender_distance(s, carrier->position) < c.press_radius;
  if (in_zone) {
    d.greedy_option = CarrierOption::Shoot;
  } else if (pressured && pass.target && pass.probability >= kSafePassProbability) {
    d.greedy_option = CarrierOption::Pass;
  } else {
    d.greedy_option = CarrierOption::Dribble;
  }

  d.option = d.greedy_option;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (available.size() > 1 && coin(rng) >= greedy_probability(difficulty)) {
    std::vector<CarrierOption> others;
    for (auto o : available) {
      if (o != d.greedy_option) others.push_back(o);
    }
    std::uniform_int_distribution<std::size_t> pick(0, others.size() - 1);
    d.option = others[pick(rng)];
  }
  if (d.option == CarrierOption::Pass) d.pass_target = pass.target;
  return d;
}

AttackerPlan attacker_policy(const GameState& s, double difficulty, std::mt19937_64& rng) {
  const auto& c = s.scenario.constants;
  const double dt = s.scenario.dt;
  const double sigma = direction_noise(difficulty, c);
  AttackerPlan plan;
  plan.memory = s.attackers;
  plan.velocities.assign(s.attackers.size(), Vec2{});
  const int first = s.first_attacker_index();

  const PlayerState* carrier = s.carrier();
  // Nearest attacker chases a loose ball.
  std::optional<int> chaser;
  if (s.ball.flight == FlightKind::Loose) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = static_cast<std::size_t>(first); k < s.players.size(); ++k) {
      const double d = distance(s.players[k].position, s.ball.position);
      if (d < best) {
        best = d;
        chaser = s.players[k].id;
      }
    }
  }

  for (std::size_t k = 0; k < s.attackers.size(); ++k) {
    const auto& p = s.players[static_cast<std::size_t>(first) + k];
    auto& mem = plan.memory[k];
    if (carrier != nullptr && carrier->id == p.id) {
      // A pressed carrier reconsiders quickly.
      if (nearest_defender_distance(s, p.position) < c.press_radius) {
        mem.decision_timer = std::min(mem.decision_timer, kPressedDecisionSteps);
      }
      if (mem.decision_timer > 0) --mem.decision_timer;
      if (mem.decision_timer == 0) {
        const CarrierDecision d = decide_carrier(s, difficulty, rng);
        plan.decision = d;
        mem.decision_timer = c.decision_period;
        if (d.option == CarrierOption::Shoot) {
          plan.kick_target = shot_aim(s, p.position);
          plan.kick_velocity = noisy_kick(p.position, plan.kick_target, c.shot_speed, sigma, rng);
        } else if (d.option == CarrierOption::Pass) {
          const auto& mate = s.players[static_cast<std::size_t>(*d.pass_target)];
          const double flight = distance(mate.position, p.position) / c.pass_speed;
          plan.kick_target = s.scenario.pitch.clamp(mate.position + mate.velocity * flight);
          plan.kick_velocity = noisy_kick(p.position, plan.kick_target, c.pass_speed, sigma, rng);
        }
      }
      if (!plan.kick_velocity) plan.velocities[k] = dribble_velocity(s, p);
      continue;
    }
    if (chaser && *chaser == p.id) {
      plan.velocities[k] = seek(p.position, s.ball.position, p.max_speed, dt);
      continue;
    }
    if (s.ball.flight == FlightKind::Pass && s.ball.receiver == p.id) {
      plan.velocities[k] = seek(p.position, s.ball.target, p.max_speed, dt);
      continue;
    }
    if (mem.decision_timer > 0) --mem.decision_timer;
    if (mem.decision_timer == 0) {
      mem.run_target = choose_run_target(s, p, difficulty, rng);
      mem.decision_timer = c.decision_period;
    }
    plan.velocities[k] = seek(p.position, mem.run_target, p.max_speed, dt);
  }
  return plan;
}

StepEvents step(GameState& s, std::span<const DefenderAction> actions) {
  if (s.terminal()) throw SteppedTerminalError("step called on a terminal state");
  if (static_cast<int>(actions.size()) != s.scenario.n_defenders) {
    throw ActionArityError("expected " + std::to_string(s.scenario.n_defenders) +
                           " defender actions, got " + std::to_string(actions.size()));
  }
  StepEvents ev;
  const auto& c = s.scenario.constants;
  const auto& pitch = s.scenario.pitch;
  const double dt = s.scenario.dt;
  const int first = s.first_attacker_index();

  AttackerPlan plan = attacker_policy(s, s.scenario.difficulty, s.rng);
  s.attackers = plan.memory;
  const Vec2 ball_focus = s.ball.position;

  // Defenders.
  for (int k = 0; k < s.scenario.n_defenders; ++k) {
    auto& p = s.players[static_cast<std::size_t>(k)];
    Vec2 v{};
    if (p.frozen_steps > 0) {
      --p.frozen_steps;
    } else {
      const auto& a = actions[static_cast<std::size_t>(k)];
      if (a.kind == DefenderAction::Kind::Move) {
        v = bearing_vector(a.bearing) * p.max_speed;
      } else if (a.kind == DefenderAction::Kind::Press) {
        v = seek(p.position, ball_focus, p.max_speed, dt);
      }
    }
    const Vec2 next = pitch.clamp(p.position + v * dt);
    p.velocity = (next - p.position) * (1.0 / dt);
    p.position = next;
  }

  // Kick leaves the carrier before anyone moves with the ball.
  if (plan.kick_velocity && s.ball.carrier) {
    const auto& kicker = s.players[static_cast<std::size_t>(*s.ball.carrier)];
    s.ball.position = kicker.position;
    s.ball.velocity = *plan.kick_velocity;
    s.ball.target = plan.kick_target;
    s.ball.kicker = kicker.id;
    if (plan.decision->option == CarrierOption::Pass) {
      s.ball.flight = FlightKind::Pass;
      s.ball.receiver = plan.decision->pass_target;
    } else {
      s.ball.flight = FlightKind::Shot;
      s.ball.receiver.reset();
    }
    s.ball.carrier.reset();
  }

  // Attackers.
  for (std::size_t k = 0; k < plan.velocities.size(); ++k) {
    auto& p = s.players[static_cast<std::size_t>(first) + k];
    Vec2 v = plan.velocities[k];
    const double speed = v.norm();
    if (speed > p.max_speed) v = v * (p.max_speed / speed);
    const Vec2 next = pitch.clamp(p.position + v * dt);
    p.velocity = (next - p.position) * (1.0 / dt);
    p.position = next;
  }
  if (s.ball.carrier) {
    const auto& carrier = s.players[static_cast<std::size_t>(*s.ball.carrier)];
    s.ball.position = carrier.position;
    s.ball.velocity = carrier.velocity;
  }

  // Tackles by pressing defenders.
  if (s.ball.carrier) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int k = 0; k < s.scenario.n_defenders && !ev.terminal; ++k) {
      auto& p = s.players[static_cast<std::size_t>(k)];
      const auto& a = actions[static_cast<std::size_t>(k)];
      if (a.kind != DefenderAction::Kind::Press || p.frozen_steps > 0) continue;
      if (distance(p.position, s.ball.position) > c.tackle_radius) continue;
      if (coin(s.rng) < c.tackle_success) {
        ev.tackle = true;
        s.ball.carrier.reset();
        s.ball.velocity = {};
        finish(s, ev, Outcome::Turnover);
      } else if (coin(s.rng) < c.foul_probability) {
        ev.foul = true;
        finish(s, ev, Outcome::Turnover);
      } else {
        p.frozen_steps = static_cast<int>(std::lround(c.beaten_time / dt));
      }
    }
  } else if (s.ball.flight != FlightKind::None) {
    advance_ball(s, ev);
  } else {
    // Dead ball with nobody on it: treat as a loose ball at rest.
    s.ball.flight = FlightKind::Loose;
    advance_ball(s, ev);
  }

  ++s.step_index;
  if (!ev.terminal && s.step_index >= s.scenario.max_episode_steps) {
    finish(s, ev, Outcome::StepLimit);
  }
  return ev;
}

std::size_t observation_size(const ScenarioConfig& scenario) {
  const auto players = static_cast<std::size_t>(scenario.n_defenders + 1 + scenario.n_attackers);
  return players * 4 + 4 + players;
}

std::vector<double> observe(const GameState& s) {
  const auto& pitch = s.scenario.pitch;
  const auto& c = s.scenario.constants;
  const double vnorm = std::max(c.defender_max_speed, c.attacker_max_speed);
  const double bnorm = std::max({c.shot_speed, c.pass_speed, vnorm});
  auto clip = [](double v) { return std::clamp(v, -1.0, 1.0); };
  std::vector<double> obs;
  obs.reserve(observation_size(s.scenario));
  for (const auto& p : s.players) {
    obs.push_back(clip(2.0 * p.position.x / pitch.length - 1.0));
    obs.push_back(clip(2.0 * p.position.y / pitch.width - 1.0));
    obs.push_back(clip(p.velocity.x / vnorm));
    obs.push_back(clip(p.velocity.y / vnorm));
  }
  obs.push_back(clip(2.0 * s.ball.position.x / pitch.length - 1.0));
  obs.push_back(clip(2.0 * s.ball.position.y / pitch.width - 1.0));
  obs.push_back(clip(s.ball.velocity.x / bnorm));
  obs.push_back(clip(s.ball.velocity.y / bnorm));
  for (const auto& p : s.players) {
    obs.push_back(s.ball.carrier && *s.ball.carrier == p.id ? 1.0 : 0.0);
  }
  return obs;
}

std::vector<double> observe_agent(const GameState& s, int agent, ObservationMode mode) {
  std::vector<double> obs = observe(s);
  if (mode == ObservationMode::Global || agent == 0) return obs;
  if (agent < 0 || agent >= s.scenario.n_defenders) {
    throw ShapeMismatch("observe_agent: agent index out of range");
  }
  const auto block = static_cast<std::ptrdiff_t>(4 * agent);
  std::rotate(obs.begin(), obs.begin() + block, obs.begin() + block + 4);
  return obs;
}

}  // namespace pitchrl
