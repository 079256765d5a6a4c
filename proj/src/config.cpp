#include "pitchrl/config.hpp"

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "pitchrl/errors.hpp"

namespace pitchrl {

namespace {

using nlohmann::json;

// Reads fields of one JSON object, remembering which keys were consumed so
// that leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(field(key) + " has the wrong type");
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown config field " + field(key.c_str()));
    }
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

// Re-raises a validation error with the section prefix when it lacks one.
template <typename F>
void validated(const std::string& section, F&& check) {
  try {
    check();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind(section, 0) == 0) throw;
    throw ConfigError(section + ": " + msg);
  }
}

PitchSpec pitch_from_json(const json& j, const std::string& path) {
  PitchSpec p;
  ObjectReader r(j, path);
  r.read("length", p.length);
  r.read("width", p.width);
  r.read("grid_m", p.grid_m);
  r.read("grid_n", p.grid_n);
  r.read("goal_half_width", p.goal_half_width);
  r.finish();
  return p;
}

json pitch_to_json(const PitchSpec& p) {
  return {{"length", p.length}, {"width", p.width}, {"grid_m", p.grid_m},
          {"grid_n", p.grid_n}, {"goal_half_width", p.goal_half_width}};
}

#define PITCHRL_CONSTANT_FIELDS(X)                                                          \
  X(defender_max_speed) X(attacker_max_speed) X(dribble_speed) X(reaction_time)             \
  X(tackle_radius) X(tackle_success) X(foul_probability) X(beaten_time) X(press_radius)     \
  X(scoring_zone) X(shooting_range) X(pass_speed) X(shot_speed) X(noise_max)                \
  X(control_radius) X(intercept_probability) X(block_probability) X(keeper_reach)           \
  X(loose_ball_decay) X(decision_period)

SimConstants constants_from_json(const json& j, const std::string& path) {
  SimConstants c;
  ObjectReader r(j, path);
#define X(name) r.read(#name, c.name);
  PITCHRL_CONSTANT_FIELDS(X)
#undef X
  r.finish();
  return c;
}

json constants_to_json(const SimConstants& c) {
  json j;
#define X(name) j[#name] = c.name;
  PITCHRL_CONSTANT_FIELDS(X)
#undef X
  return j;
}

ShapingMode mode_from_string(const std::string& s, const std::string& field) {
  if (s == "additive") return ShapingMode::Additive;
  if (s == "potential_based") return ShapingMode::PotentialBased;
  throw ConfigError(field + " must be 'additive' or 'potential_based'");
}

std::string mode_name(ShapingMode m) { return m == ShapingMode::Additive ? "additive" : "potential_based"; }

std::string observation_mode_name(ObservationMode m) {
  return m == ObservationMode::Global ? "global" : "egocentric";
}

}  // namespace

ScenarioConfig scenario_from_json(const json& j) {
  ScenarioConfig s;
  ObjectReader r(j, "scenario");
  r.read("n_defenders", s.n_defenders);
  r.read("n_attackers", s.n_attackers);
  r.read("difficulty", s.difficulty);
  r.read("max_episode_steps", s.max_episode_steps);
  r.read("dt", s.dt);
  if (const json* p = r.child("pitch")) s.pitch = pitch_from_json(*p, "scenario.pitch");
  if (const json* c = r.child("constants")) s.constants = constants_from_json(*c, "scenario.constants");
  r.finish();
  return s;
}

json to_json(const ScenarioConfig& s) {
  return {{"n_defenders", s.n_defenders},
          {"n_attackers", s.n_attackers},
          {"difficulty", s.difficulty},
          {"max_episode_steps", s.max_episode_steps},
          {"dt", s.dt},
          {"pitch", pitch_to_json(s.pitch)},
          {"constants", constants_to_json(s.constants)}};
}

void ExperimentConfig::validate() const {
  validated("scenario", [&] { scenario.validate(); });
  validated("reward", [&] { reward.validate(); });
  validated("train", [&] { train.validate(); });
  validated("pass_model", [&] { pass_model.validate(); });
  if (seeds.empty()) throw ConfigError("seeds must be non-empty");
  if (eval_every < 1) throw ConfigError("eval_every must be >= 1");
  if (eval_episodes < 1) throw ConfigError("eval_episodes must be >= 1");
  if (eval_difficulties.empty()) throw ConfigError("eval_difficulties must be non-empty");
  for (double d : eval_difficulties) {
    if (!(d >= 0.0 && d <= 1.0)) throw ConfigError("eval_difficulties entries must be in [0, 1]");
  }
  if (field_stride < 1) throw ConfigError("field_stride must be >= 1");
  if (checkpoint_every < 0) throw ConfigError("checkpoint_every must be >= 0");
  if (epv_source.empty()) throw ConfigError("epv_source must be 'default_chain' or a file path");
}

ExperimentConfig experiment_config_from_json(const json& j) {
  ExperimentConfig c;
  ObjectReader r(j, "");
  if (const json* s = r.child("scenario")) c.scenario = scenario_from_json(*s);
  if (const json* rw = r.child("reward")) {
    ObjectReader rr(*rw, "reward");
    rr.read("shaping_weight", c.reward.shaping_weight);
    std::string mode = mode_name(c.reward.mode);
    rr.read("mode", mode);
    c.reward.mode = mode_from_string(mode, "reward.mode");
    rr.read("gamma", c.reward.gamma);
    rr.finish();
  }
  if (const json* t = r.child("train")) {
    ObjectReader tr(*t, "train");
    auto& tc = c.train;
    tr.read("learning_rate", tc.learning_rate);
    tr.read("gamma", tc.gamma);
    tr.read("epsilon_start", tc.epsilon_start);
    tr.read("epsilon_end", tc.epsilon_end);
    tr.read("epsilon_decay_fraction", tc.epsilon_decay_fraction);
    tr.read("batch_size", tc.batch_size);
    tr.read("target_sync_period", tc.target_sync_period);
    tr.read("buffer_capacity", tc.buffer_capacity);
    tr.read("hidden", tc.hidden);
    tr.read("total_steps", tc.total_steps);
    tr.read("train_every", tc.train_every);
    tr.read("learning_starts", tc.learning_starts);
    tr.read("grad_clip", tc.grad_clip);
    std::string obs = observation_mode_name(tc.observation_mode);
    tr.read("observation_mode", obs);
    if (obs == "global") {
      tc.observation_mode = ObservationMode::Global;
    } else if (obs == "egocentric") {
      tc.observation_mode = ObservationMode::Egocentric;
    } else {
      throw ConfigError("train.observation_mode must be 'global' or 'egocentric'");
    }
    tr.finish();
  }
  if (const json* p = r.child("pass_model")) {
    ObjectReader pr(*p, "pass_model");
    pr.read("sigma", c.pass_model.sigma);
    pr.read("lambda", c.pass_model.lambda);
    pr.finish();
  }
  r.read("epv_source", c.epv_source);
  r.read("seeds", c.seeds);
  r.read("eval_every", c.eval_every);
  r.read("eval_episodes", c.eval_episodes);
  r.read("eval_difficulties", c.eval_difficulties);
  r.read("field_stride", c.field_stride);
  r.read("checkpoint_every", c.checkpoint_every);
  r.finish();
  c.validate();
  return c;
}

json to_json(const ExperimentConfig& c) {
  const auto& t = c.train;
  return {{"scenario", to_json(c.scenario)},
          {"reward",
           {{"shaping_weight", c.reward.shaping_weight},
            {"mode", mode_name(c.reward.mode)},
            {"gamma", c.reward.gamma}}},
          {"train",
           {{"learning_rate", t.learning_rate},
            {"gamma", t.gamma},
            {"epsilon_start", t.epsilon_start},
            {"epsilon_end", t.epsilon_end},
            {"epsilon_decay_fraction", t.epsilon_decay_fraction},
            {"batch_size", t.batch_size},
            {"target_sync_period", t.target_sync_period},
            {"buffer_capacity", t.buffer_capacity},
            {"hidden", t.hidden},
            {"total_steps", t.total_steps},
            {"train_every", t.train_every},
            {"learning_starts", t.learning_starts},
            {"grad_clip", t.grad_clip},
            {"observation_mode", observation_mode_name(t.observation_mode)}}},
          {"pass_model", {{"sigma", c.pass_model.sigma}, {"lambda", c.pass_model.lambda}}},
          {"epv_source", c.epv_source},
          {"seeds", c.seeds},
          {"eval_every", c.eval_every},
          {"eval_episodes", c.eval_episodes},
          {"eval_difficulties", c.eval_difficulties},
          {"field_stride", c.field_stride},
          {"checkpoint_every", c.checkpoint_every}};
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return experiment_config_from_json(j);
}

std::string config_hash(const ExperimentConfig& config) {
  json j = to_json(config);
  j.erase("seeds");
  const std::string text = j.dump();
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str().substr(0, 12);
}

std::string outcome_name(Outcome outcome) {
  switch (outcome) {
    case Outcome::GoalConceded:
      return "goal_conceded";
    case Outcome::OutOfBounds:
      return "out_of_bounds";
    case Outcome::Turnover:
      return "turnover";
    case Outcome::StepLimit:
      return "step_limit";
  }
  return "unknown";
}

namespace {

const char* flight_name(FlightKind f) {
  switch (f) {
    case FlightKind::Pass:
      return "pass";
    case FlightKind::Shot:
      return "shot";
    case FlightKind::Loose:
      return "loose";
    case FlightKind::None:
      break;
  }
  return "none";
}

}  // namespace

json state_to_json(const GameState& s) {
  json players = json::array();
  for (const auto& p : s.players) {
    players.push_back({{"id", p.id},
                       {"team", p.team == Team::Defending ? "defending" : "attacking"},
                       {"role", p.role == Role::Outfield ? "outfield" : "lazy_goalkeeper"},
                       {"x", p.position.x},
                       {"y", p.position.y},
                       {"vx", p.velocity.x},
                       {"vy", p.velocity.y}});
  }
  json ball{{"x", s.ball.position.x},
            {"y", s.ball.position.y},
            {"vx", s.ball.velocity.x},
            {"vy", s.ball.velocity.y},
            {"carrier", s.ball.carrier ? json(*s.ball.carrier) : json(nullptr)},
            {"flight", flight_name(s.ball.flight)}};
  json j{{"step", s.step_index}, {"scenario", to_json(s.scenario)}, {"players", players}, {"ball", ball}};
  if (s.outcome) {
    j["outcome"] = outcome_name(s.outcome->kind);
    j["goal_difference"] = s.outcome->goal_difference;
  }
  return j;
}

GameState state_from_json(const json& j) {
  try {
    GameState s;
    if (j.contains("scenario")) s.scenario = scenario_from_json(j.at("scenario"));
    s.step_index = j.value("step", 0);
    int defenders = 0;
    int attackers = 0;
    for (const auto& pj : j.at("players")) {
      PlayerState p;
      p.id = static_cast<int>(s.players.size());
      const std::string team = pj.at("team").get<std::string>();
      if (team != "defending" && team != "attacking") throw FormatError("player team must be defending|attacking");
      p.team = team == "defending" ? Team::Defending : Team::Attacking;
      p.role = pj.value("role", std::string("outfield")) == "lazy_goalkeeper" ? Role::LazyGoalkeeper : Role::Outfield;
      p.position = {pj.at("x").get<double>(), pj.at("y").get<double>()};
      p.velocity = {pj.value("vx", 0.0), pj.value("vy", 0.0)};
      const auto& c = s.scenario.constants;
      p.reaction_time = c.reaction_time;
      if (p.role == Role::LazyGoalkeeper) {
        p.max_speed = 0.0;
        p.velocity = {};
      } else {
        p.max_speed = p.team == Team::Defending ? c.defender_max_speed : c.attacker_max_speed;
      }
      if (p.team == Team::Attacking) {
        ++attackers;
        s.attackers.push_back({c.decision_period, p.position});
      } else if (p.role == Role::Outfield) {
        ++defenders;
      }
      s.players.push_back(p);
    }
    if (j.contains("ball")) {
      const auto& b = j.at("ball");
      s.ball.position = {b.at("x").get<double>(), b.at("y").get<double>()};
      s.ball.velocity = {b.value("vx", 0.0), b.value("vy", 0.0)};
      if (b.contains("carrier") && !b.at("carrier").is_null()) s.ball.carrier = b.at("carrier").get<int>();
    }
    if (!j.contains("scenario")) {
      s.scenario.n_defenders = std::max(defenders, 1);
      s.scenario.n_attackers = std::max(attackers, 1);
    }
    return s;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed state JSON: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("malformed state JSON: ") + e.what());
  }
}

json events_to_json(const StepEvents& e) {
  return {{"goal", e.goal},         {"out_of_bounds", e.out_of_bounds}, {"turnover", e.turnover},
          {"tackle", e.tackle},     {"foul", e.foul},                   {"terminal", e.terminal}};
}

}  // namespace pitchrl
