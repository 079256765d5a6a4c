#include "pitchrl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include "pitchrl/errors.hpp"

namespace pitchrl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kEvaluationSalt = 0x5EED0FE7A1C0FFEEULL;

std::vector<std::vector<double>> agent_observations(const GameState& state, int agents, ObservationMode mode) {
  std::vector<std::vector<double>> obs;
  obs.reserve(static_cast<std::size_t>(agents));
  if (mode == ObservationMode::Global) {
    const auto shared = observe(state);
    obs.assign(static_cast<std::size_t>(agents), shared);
  } else {
    for (int a = 0; a < agents; ++a) obs.push_back(observe_agent(state, a, mode));
  }
  return obs;
}

std::vector<DefenderAction> to_actions(const std::vector<int>& indices) {
  std::vector<DefenderAction> actions;
  actions.reserve(indices.size());
  for (int i : indices) actions.push_back(DefenderAction::from_index(i));
  return actions;
}

std::vector<int> network_shape(const ExperimentConfig& config) {
  std::vector<int> shape{static_cast<int>(observation_size(config.scenario))};
  shape.insert(shape.end(), config.train.hidden.begin(), config.train.hidden.end());
  shape.push_back(DefenderAction::kCount);
  return shape;
}

// Per-episode accumulator shared by training and evaluation.
struct EpisodeTally {
  int steps = 0;
  double shaped = 0.0;
  double sparse = 0.0;
  double epv_sum = 0.0;

  EpisodeRecord finish(const GameState& state, std::uint64_t seed, long episode, const char* kind,
                       long train_step, double difficulty) const {
    EpisodeRecord r;
    r.seed = seed;
    r.episode = episode;
    r.kind = kind;
    r.train_step = train_step;
    r.difficulty = difficulty;
    r.steps = steps;
    r.outcome = state.outcome->kind;
    r.goal_difference = state.outcome->goal_difference;
    r.shaped_return = shaped;
    r.sparse_return = sparse;
    r.mean_game_state_epv = steps > 0 ? epv_sum / steps : 0.0;
    return r;
  }
};

void write_line(std::ofstream& out, const json& j) { out << j.dump() << '\n'; }

}  // namespace

json to_json(const EpisodeRecord& r) {
  return {{"seed", r.seed},
          {"episode", r.episode},
          {"kind", r.kind},
          {"train_step", r.train_step},
          {"difficulty", r.difficulty},
          {"steps", r.steps},
          {"outcome", outcome_name(r.outcome)},
          {"goal_difference", r.goal_difference},
          {"shaped_return", r.shaped_return},
          {"sparse_return", r.sparse_return},
          {"mean_game_state_epv", r.mean_game_state_epv}};
}

json to_json(const EvaluationRow& r) {
  return {{"seed", r.seed},
          {"step", r.step},
          {"difficulty", r.difficulty},
          {"episodes", r.episodes},
          {"mean_goal_difference", r.mean_goal_difference},
          {"final", r.final},
          {"curve", r.curve}};
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 finalizer over the combined input.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t evaluation_seed(std::uint64_t training_seed) { return training_seed ^ kEvaluationSalt; }

EPVGrid resolve_epv_grid(const ExperimentConfig& config) {
  const auto& pitch = config.scenario.pitch;
  EPVGrid grid = config.epv_source == kDefaultChainSource ? solve_epv(default_chain(pitch))
                                                         : load_epv(config.epv_source);
  if (grid.m != pitch.grid_m || grid.n != pitch.grid_n) {
    throw DimensionMismatch("EPV grid is " + std::to_string(grid.m) + "x" + std::to_string(grid.n) +
                            " but the pitch grid is " + std::to_string(pitch.grid_m) + "x" +
                            std::to_string(pitch.grid_n));
  }
  return grid;
}

double state_game_epv(const GameState& state, const PassModelParams& params, const EPVGrid& grid) {
  return game_state_epv(compute_control_field(state, state.scenario.pitch, params), grid);
}

EvaluationResult evaluate_policy(const std::vector<QNetwork>& nets, const ExperimentConfig& config,
                                 const EPVGrid& grid, double difficulty, int n_episodes,
                                 std::uint64_t seed) {
  if (n_episodes < 1) throw ConfigError("evaluation needs at least one episode");
  ScenarioConfig scenario = config.scenario;
  scenario.difficulty = difficulty;
  const int agents = scenario.n_defenders;
  std::mt19937_64 unused;  // epsilon = 0 never draws
  EvaluationResult result;
  double total = 0.0;
  for (int e = 0; e < n_episodes; ++e) {
    GameState state = reset(scenario, mix_seed(seed, static_cast<std::uint64_t>(e)));
    double epv_prev = state_game_epv(state, config.pass_model, grid);
    EpisodeTally tally;
    while (!state.terminal()) {
      const auto obs = agent_observations(state, agents, config.train.observation_mode);
      const auto actions = to_actions(select_actions(nets, obs, 0.0, unused));
      const StepEvents ev = step(state, actions);
      const double sparse = sparse_reward(ev);
      double epv_curr = epv_prev;
      if (tally.steps % config.field_stride == config.field_stride - 1 || config.field_stride == 1) {
        epv_curr = state_game_epv(state, config.pass_model, grid);
      }
      tally.shaped += shaped_reward(sparse, epv_prev, epv_curr, config.reward);
      tally.sparse += sparse;
      tally.epv_sum += epv_curr;
      ++tally.steps;
      epv_prev = epv_curr;
    }
    result.records.push_back(tally.finish(state, seed, e, "eval", 0, difficulty));
    total += state.outcome->goal_difference;
  }
  result.mean_goal_difference = total / n_episodes;
  return result;
}

EvaluationResult evaluate(const fs::path& checkpoint, double difficulty, int n_episodes,
                          std::optional<std::uint64_t> seed) {
  const Checkpoint ckpt = load_checkpoint(checkpoint);
  ExperimentConfig config;
  try {
    config = experiment_config_from_json(ckpt.config);
  } catch (const ConfigError& e) {
    throw CheckpointFormatError("checkpoint " + checkpoint.string() + " carries an invalid config: " + e.what());
  }
  if (static_cast<int>(ckpt.nets.size()) != config.scenario.n_defenders ||
      ckpt.nets.front().input_size() != static_cast<int>(observation_size(config.scenario))) {
    throw CheckpointFormatError("checkpoint " + checkpoint.string() + ": networks do not match its scenario");
  }
  const EPVGrid grid = resolve_epv_grid(config);
  const std::uint64_t s = seed ? *seed : evaluation_seed(config.seeds.front());
  return evaluate_policy(ckpt.nets, config, grid, difficulty, n_episodes, s);
}

fs::path seed_run_dir(const ExperimentConfig& config, std::uint64_t seed, const fs::path& out_dir) {
  return out_dir / (config_hash(config) + "-seed" + std::to_string(seed));
}

SeedRunResult run_seed(const ExperimentConfig& base, std::uint64_t seed, const fs::path& run_dir) {
  base.validate();
  ExperimentConfig config = base;
  config.seeds = {seed};
  SeedRunResult result;
  result.seed = seed;
  result.run_dir = run_dir;
  fs::create_directories(run_dir);
  {
    std::ofstream echo(run_dir / "config.json");
    echo << to_json(config).dump(2) << '\n';
  }
  std::ofstream metrics(run_dir / "metrics.jsonl");
  std::ofstream evaluations(run_dir / "evaluations.jsonl");

  const auto& tc = config.train;
  const int agents = config.scenario.n_defenders;
  std::vector<QNetwork> nets;
  {
    std::mt19937_64 init_rng(mix_seed(seed, 1));
    for (int a = 0; a < agents; ++a) nets.emplace_back(network_shape(config), init_rng);
  }
  std::vector<QNetwork> target = nets;
  std::mt19937_64 explore_rng(mix_seed(seed, 2));
  std::mt19937_64 sample_rng(mix_seed(seed, 3));
  ReplayBuffer buffer(static_cast<std::size_t>(tc.buffer_capacity));

  try {
    const EPVGrid grid = resolve_epv_grid(config);
    const std::uint64_t eval_seed = evaluation_seed(seed);
    auto run_evaluation = [&](long at_step, double difficulty, bool final) {
      EvaluationResult r = evaluate_policy(nets, config, grid, difficulty, config.eval_episodes, eval_seed);
      for (auto& rec : r.records) {
        rec.seed = seed;
        rec.train_step = at_step;
        write_line(metrics, to_json(rec));
      }
      EvaluationRow row{seed, at_step, difficulty, config.eval_episodes, r.mean_goal_difference, final,
                        difficulty == config.scenario.difficulty};
      write_line(evaluations, to_json(row));
      result.evaluations.push_back(row);
    };

    long episode = 0;
    GameState state = reset(config.scenario, mix_seed(seed, 1000 + static_cast<std::uint64_t>(episode)));
    double epv_prev = state_game_epv(state, config.pass_model, grid);
    auto obs = agent_observations(state, agents, tc.observation_mode);
    EpisodeTally tally;

    for (long t = 0; t < tc.total_steps; ++t) {
      if (t % config.eval_every == 0) run_evaluation(t, config.scenario.difficulty, false);

      const auto indices = select_actions(nets, obs, tc.epsilon_at(t), explore_rng);
      const StepEvents ev = step(state, to_actions(indices));
      const double sparse = sparse_reward(ev);
      double epv_curr = epv_prev;
      if (config.field_stride == 1 || tally.steps % config.field_stride == config.field_stride - 1) {
        epv_curr = state_game_epv(state, config.pass_model, grid);
      }
      const double reward = shaped_reward(sparse, epv_prev, epv_curr, config.reward);
      auto next_obs = agent_observations(state, agents, tc.observation_mode);

      const bool truncated = ev.terminal && state.outcome->kind == Outcome::StepLimit;
      buffer.push({obs, indices, reward, next_obs, ev.terminal && !truncated});

      tally.shaped += reward;
      tally.sparse += sparse;
      tally.epv_sum += epv_curr;
      ++tally.steps;

      if (t + 1 >= tc.learning_starts && (t + 1) % tc.train_every == 0) {
        const auto batch = buffer.sample(static_cast<std::size_t>(tc.batch_size), sample_rng);
        const double loss = td_update(nets, target, batch, tc);
        if (!std::isfinite(loss)) throw NonConvergence("TD loss diverged at step " + std::to_string(t));
      }
      if ((t + 1) % tc.target_sync_period == 0) sync_target(nets, target);
      if (config.checkpoint_every > 0 && (t + 1) % config.checkpoint_every == 0) {
        save_checkpoint({to_json(config), nets, t + 1}, run_dir / ("checkpoint-" + std::to_string(t + 1) + ".json"));
      }

      if (ev.terminal) {
        write_line(metrics, to_json(tally.finish(state, seed, episode, "train", t + 1, config.scenario.difficulty)));
        ++episode;
        state = reset(config.scenario, mix_seed(seed, 1000 + static_cast<std::uint64_t>(episode)));
        epv_prev = state_game_epv(state, config.pass_model, grid);
        obs = agent_observations(state, agents, tc.observation_mode);
        tally = {};
      } else {
        epv_prev = epv_curr;
        obs = std::move(next_obs);
      }
    }

    for (double d : config.eval_difficulties) run_evaluation(tc.total_steps, d, true);
    if (std::find(config.eval_difficulties.begin(), config.eval_difficulties.end(),
                  config.scenario.difficulty) == config.eval_difficulties.end()) {
      run_evaluation(tc.total_steps, config.scenario.difficulty, true);
    }
    save_checkpoint({to_json(config), nets, tc.total_steps}, run_dir / "final.json");
    result.final_nets = nets;
  } catch (const NonConvergence& e) {
    result.failed = true;
    result.failure = e.what();
    std::ofstream failure(run_dir / "failure.json");
    failure << json{{"seed", seed}, {"error", e.what()}}.dump() << '\n';
  }
  return result;
}

std::vector<SeedRunResult> run_training(const ExperimentConfig& config, const fs::path& out_dir, int jobs) {
  config.validate();
  resolve_epv_grid(config);  // fail fast on a bad EPV source
  std::vector<SeedRunResult> results(config.seeds.size());
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1, config.seeds.size());
  if (workers == 1) {
    for (std::size_t k = 0; k < config.seeds.size(); ++k) {
      results[k] = run_seed(config, config.seeds[k], seed_run_dir(config, config.seeds[k], out_dir));
    }
    return results;
  }
  std::mutex mu;
  std::size_t next = 0;
  std::exception_ptr error;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t k;
        {
          std::lock_guard lock(mu);
          if (next >= config.seeds.size() || error) return;
          k = next++;
        }
        try {
          results[k] = run_seed(config, config.seeds[k], seed_run_dir(config, config.seeds[k], out_dir));
        } catch (...) {
          std::lock_guard lock(mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return results;
}

std::vector<json> replay_episode(const std::vector<QNetwork>& nets, const ExperimentConfig& config,
                                 const EPVGrid& grid, double difficulty, std::uint64_t seed) {
  ScenarioConfig scenario = config.scenario;
  scenario.difficulty = difficulty;
  GameState state = reset(scenario, seed);
  std::mt19937_64 unused;
  std::vector<json> trace;
  json first = state_to_json(state);
  first["actions"] = json::array();
  first["events"] = events_to_json({});
  first["game_state_epv"] = state_game_epv(state, config.pass_model, grid);
  trace.push_back(std::move(first));
  while (!state.terminal()) {
    const auto obs = agent_observations(state, scenario.n_defenders, config.train.observation_mode);
    const auto indices = select_actions(nets, obs, 0.0, unused);
    const StepEvents ev = step(state, to_actions(indices));
    json line = state_to_json(state);
    line["actions"] = indices;
    line["events"] = events_to_json(ev);
    line["game_state_epv"] = state_game_epv(state, config.pass_model, grid);
    trace.push_back(std::move(line));
  }
  return trace;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw EmptyLog("percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<CurvePoint> learning_curve(const std::vector<EvaluationRow>& rows) {
  std::map<long, std::vector<double>> by_step;
  for (const auto& r : rows) {
    if (r.curve) by_step[r.step].push_back(r.mean_goal_difference);
  }
  if (by_step.empty()) throw EmptyLog("no evaluation rows on the learning-curve schedule");
  std::vector<CurvePoint> curve;
  for (const auto& [step, values] : by_step) {
    curve.push_back({step, percentile(values, 0.5), percentile(values, 0.25), percentile(values, 0.75)});
  }
  return curve;
}

std::vector<EvaluationRow> load_evaluations(const fs::path& run_dir) {
  const fs::path path = run_dir / "evaluations.jsonl";
  std::ifstream in(path);
  if (!in) throw EmptyLog("no evaluations.jsonl in " + run_dir.string());
  std::vector<EvaluationRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      rows.push_back({j.at("seed").get<std::uint64_t>(), j.at("step").get<long>(), j.at("difficulty").get<double>(),
                      j.at("episodes").get<int>(), j.at("mean_goal_difference").get<double>(),
                      j.at("final").get<bool>(), j.at("curve").get<bool>()});
    } catch (const json::exception& e) {
      throw FormatError("malformed line in " + path.string() + ": " + e.what());
    }
  }
  return rows;
}

void write_curve_csv(const std::vector<CurvePoint>& curve, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write curve: " + path.string());
  out.precision(17);
  out << "step,median,q25,q75\n";
  for (const auto& p : curve) out << p.step << ',' << p.median << ',' << p.q25 << ',' << p.q75 << '\n';
}

}  // namespace pitchrl
