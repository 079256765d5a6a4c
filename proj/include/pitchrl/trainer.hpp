#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pitchrl/config.hpp"
#include "pitchrl/epv.hpp"
#include "pitchrl/vdn.hpp"

namespace pitchrl {

struct EpisodeRecord {
  std::uint64_t seed = 0;
  long episode = 0;
  std::string kind;     // "train" or "eval"
  long train_step = 0;  // env step at episode end (train) or of the evaluation point (eval)
  double difficulty = 0.0;
  int steps = 0;
  Outcome outcome = Outcome::StepLimit;
  int goal_difference = 0;
  double shaped_return = 0.0;
  double sparse_return = 0.0;
  double mean_game_state_epv = 0.0;
};
nlohmann::json to_json(const EpisodeRecord& r);

struct EvaluationResult {
  double mean_goal_difference = 0.0;
  std::vector<EpisodeRecord> records;
};

// One evaluation point of a training run (a row of evaluations.jsonl).
struct EvaluationRow {
  std::uint64_t seed = 0;
  long step = 0;
  double difficulty = 0.0;
  int episodes = 0;
  double mean_goal_difference = 0.0;
  bool final = false;
  bool curve = false;  // on the training-difficulty schedule
};
nlohmann::json to_json(const EvaluationRow& r);

struct SeedRunResult {
  std::uint64_t seed = 0;
  std::filesystem::path run_dir;
  bool failed = false;
  std::string failure;
  std::vector<EvaluationRow> evaluations;
  std::vector<QNetwork> final_nets;
};

// Seed derivation shared by training, evaluation and replays.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);
std::uint64_t evaluation_seed(std::uint64_t training_seed);

// EPV grid named by config.epv_source for the scenario's pitch.
EPVGrid resolve_epv_grid(const ExperimentConfig& config);

// Computes the control field and contracts it with `grid`.
double state_game_epv(const GameState& state, const PassModelParams& params, const EPVGrid& grid);

// Greedy rollouts of `nets` at `difficulty`. Episode k uses environment seed
// mix_seed(seed, k), so results depend only on (nets, config, seed).
EvaluationResult evaluate_policy(const std::vector<QNetwork>& nets, const ExperimentConfig& config,
                                 const EPVGrid& grid, double difficulty, int n_episodes,
                                 std::uint64_t seed);

// Loads the checkpoint, rebuilds its experiment config and evaluates.
EvaluationResult evaluate(const std::filesystem::path& checkpoint, double difficulty, int n_episodes,
                          std::optional<std::uint64_t> seed = std::nullopt);

// Trains one seed into `run_dir` (metrics.jsonl, evaluations.jsonl,
// config.json, checkpoints). NonConvergence aborts the seed and is recorded
// in failure.json.
SeedRunResult run_seed(const ExperimentConfig& config, std::uint64_t seed,
                       const std::filesystem::path& run_dir);

// Runs every seed under out_dir/<config_hash>-seed<seed>, up to `jobs` at a time.
std::vector<SeedRunResult> run_training(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                        int jobs = 1);
std::filesystem::path seed_run_dir(const ExperimentConfig& config, std::uint64_t seed,
                                   const std::filesystem::path& out_dir);

// Greedy episode with the full per-step trace (state, actions, events, EPV).
std::vector<nlohmann::json> replay_episode(const std::vector<QNetwork>& nets, const ExperimentConfig& config,
                                           const EPVGrid& grid, double difficulty, std::uint64_t seed);

struct CurvePoint {
  long step = 0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

// Linear-interpolation percentile, q in [0, 1].
double percentile(std::vector<double> values, double q);

// Median and quartiles across seeds of the curve-schedule evaluation rows,
// one point per evaluation step. Throws EmptyLog without rows.
std::vector<CurvePoint> learning_curve(const std::vector<EvaluationRow>& rows);
std::vector<EvaluationRow> load_evaluations(const std::filesystem::path& run_dir);
void write_curve_csv(const std::vector<CurvePoint>& curve, const std::filesystem::path& path);

}  // namespace pitchrl
