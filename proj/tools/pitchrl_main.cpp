// Command-line driver: train, eval, fit-pass-model, solve-epv, render-field,
// replay, curve. Exit codes: 0 success, 2 usage/config error, 3 runtime failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pitchrl/config.hpp"
#include "pitchrl/epv.hpp"
#include "pitchrl/errors.hpp"
#include "pitchrl/pitch_control.hpp"
#include "pitchrl/render.hpp"
#include "pitchrl/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pitchrl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
  std::vector<std::uint64_t> seeds;
  std::stringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      seeds.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--seeds: '" + item + "' is not an unsigned integer");
    }
  }
  if (seeds.empty()) throw ConfigError("--seeds must list at least one seed");
  return seeds;
}

struct TrainArgs {
  std::string config;
  std::string out;
  std::string seeds;
  bool baseline = false;
  int jobs = 1;
};

int cmd_train(const TrainArgs& a) {
  ExperimentConfig config = load_experiment_config(a.config);
  if (!a.seeds.empty()) config.seeds = parse_seed_list(a.seeds);
  if (a.baseline) config.reward.shaping_weight = 0.0;
  const auto results = run_training(config, a.out, a.jobs);
  int failures = 0;
  for (const auto& r : results) {
    std::cout << "seed " << r.seed << " -> " << r.run_dir.string();
    if (r.failed) {
      ++failures;
      std::cout << " FAILED: " << r.failure << '\n';
      continue;
    }
    for (const auto& row : r.evaluations) {
      if (row.final) std::cout << " | difficulty " << row.difficulty << ": " << row.mean_goal_difference;
    }
    std::cout << '\n';
  }
  return failures == static_cast<int>(results.size()) ? kExitRuntime : kExitOk;
}

struct EvalArgs {
  std::string checkpoint;
  double difficulty = -1.0;
  int episodes = 32;
  long long seed = -1;
};

int cmd_eval(const EvalArgs& a) {
  double difficulty = a.difficulty;
  if (difficulty < 0.0) {
    difficulty = experiment_config_from_json(load_checkpoint(a.checkpoint).config).scenario.difficulty;
  }
  std::optional<std::uint64_t> seed;
  if (a.seed >= 0) seed = static_cast<std::uint64_t>(a.seed);
  const EvaluationResult r = evaluate(a.checkpoint, difficulty, a.episodes, seed);
  std::cout.precision(17);
  std::cout << "mean_goal_difference " << r.mean_goal_difference << '\n';
  return kExitOk;
}

struct FitArgs {
  std::string events;
  std::string out;
  double sigma0 = 0.45;
  double lambda0 = 0.0;
  double tol = 1e-8;
};

int cmd_fit(const FitArgs& a) {
  const auto events = load_pass_events(a.events);
  const PassModelParams fitted = fit_pass_model(events, {a.sigma0, a.lambda0}, {a.tol, 200});
  const json j{{"sigma", fitted.sigma},
               {"lambda", fitted.lambda},
               {"log_likelihood", log_likelihood(fitted, events)},
               {"events", events.size()}};
  std::ofstream out(a.out);
  if (!out) throw FormatError("cannot write " + a.out);
  out << j.dump(2) << '\n';
  std::cout << j.dump() << '\n';
  return kExitOk;
}

struct SolveArgs {
  std::string spec;
  std::string out;
  PitchSpec pitch{};
  DefaultChainParams chain{};
  double tol = 1e-8;
};

int cmd_solve(SolveArgs a, const CLI::App& sub) {
  PitchSpec pitch;
  if (!a.spec.empty()) {
    std::ifstream in(a.spec);
    if (!in) throw ConfigError("cannot open pitch spec: " + a.spec);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ConfigError("pitch spec " + a.spec + " is not valid JSON: " + e.what());
    }
    ExperimentConfig wrapped = experiment_config_from_json({{"scenario", {{"pitch", j}}}});
    pitch = wrapped.scenario.pitch;
  }
  // Explicit flags override the spec file.
  if (sub.count("--length")) pitch.length = a.pitch.length;
  if (sub.count("--width")) pitch.width = a.pitch.width;
  if (sub.count("--grid-m")) pitch.grid_m = a.pitch.grid_m;
  if (sub.count("--grid-n")) pitch.grid_n = a.pitch.grid_n;
  if (sub.count("--goal-half-width")) pitch.goal_half_width = a.pitch.goal_half_width;
  pitch.validate();
  if (!(a.tol > 0.0)) throw ConfigError("--tol must be > 0");
  const EPVGrid grid = solve_epv(default_chain(pitch, a.chain), {a.tol, 1'000'000});
  save_epv(grid, a.out);
  std::cout << "wrote " << grid.m << "x" << grid.n << " EPV grid to " << a.out << '\n';
  return kExitOk;
}

struct RenderArgs {
  std::string checkpoint;
  std::string state;
  std::string what = "control";
  std::string out;
  std::string epv;
  int frame = 0;
  int steps = 0;
  std::uint64_t seed = 0;
};

GameState read_state_file(const std::string& path, int frame) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open state file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    if (path.size() >= 6 && path.substr(path.size() - 6) == ".jsonl") {
      std::stringstream lines(text);
      std::string line;
      int k = 0;
      while (std::getline(lines, line)) {
        if (line.empty()) continue;
        if (k++ == frame) return state_from_json(json::parse(line));
      }
      throw FormatError("state file " + path + " has no frame " + std::to_string(frame));
    }
    return state_from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw FormatError("state file " + path + " is not valid JSON: " + e.what());
  }
}

int cmd_render(const RenderArgs& a) {
  if (a.what != "control" && a.what != "epv" && a.what != "overlay") {
    throw ConfigError("--what must be control, epv or overlay");
  }
  ExperimentConfig config;
  std::optional<GameState> state;
  if (!a.checkpoint.empty()) {
    const Checkpoint ckpt = load_checkpoint(a.checkpoint);
    config = experiment_config_from_json(ckpt.config);
    const EPVGrid grid = resolve_epv_grid(config);
    const auto trace = replay_episode(ckpt.nets, config, grid, config.scenario.difficulty, a.seed);
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(std::max(a.steps, 0)), trace.size() - 1);
    state = state_from_json(trace[k]);
  } else if (!a.state.empty()) {
    state = read_state_file(a.state, a.frame);
    config.scenario = state->scenario;
  } else if (a.what != "epv") {
    throw ConfigError("render-field needs --checkpoint or --state for --what " + a.what);
  }
  if (!a.epv.empty()) config.epv_source = a.epv;

  Scene scene;
  scene.pitch = config.scenario.pitch;
  scene.state = state;
  if (a.what == "control") {
    scene.field = compute_control_field(*state, scene.pitch, config.pass_model).values;
    scene.scale = ColorScale::Diverging;
  } else {
    const EPVGrid grid = resolve_epv_grid(config);
    scene.scale = ColorScale::Sequential;
    scene.field = grid.values;
    if (a.what == "overlay") {
      if (!state) throw ConfigError("--what overlay needs --checkpoint or --state");
      const auto control = compute_control_field(*state, scene.pitch, config.pass_model);
      for (std::size_t k = 0; k < scene.field.size(); ++k) scene.field[k] *= control.values[k];
    }
  }
  render_to_file(scene, a.out);
  std::cout << "wrote " << a.out << '\n';
  return kExitOk;
}

struct ReplayArgs {
  std::string checkpoint;
  std::uint64_t seed = 0;
  std::string out;
  double difficulty = -1.0;
};

int cmd_replay(const ReplayArgs& a) {
  const Checkpoint ckpt = load_checkpoint(a.checkpoint);
  const ExperimentConfig config = experiment_config_from_json(ckpt.config);
  const EPVGrid grid = resolve_epv_grid(config);
  const double difficulty = a.difficulty < 0.0 ? config.scenario.difficulty : a.difficulty;
  const auto trace = replay_episode(ckpt.nets, config, grid, difficulty, a.seed);
  std::ofstream out(a.out);
  if (!out) throw FormatError("cannot write " + a.out);
  for (const auto& line : trace) out << line.dump() << '\n';
  std::cout << "wrote " << trace.size() << " frames to " << a.out << '\n';
  return kExitOk;
}

struct CurveArgs {
  std::vector<std::string> runs;
  std::string out;
};

int cmd_curve(const CurveArgs& a) {
  std::vector<EvaluationRow> rows;
  for (const auto& run : a.runs) {
    const fs::path dir(run);
    if (fs::exists(dir / "evaluations.jsonl")) {
      auto r = load_evaluations(dir);
      rows.insert(rows.end(), r.begin(), r.end());
      continue;
    }
    if (!fs::is_directory(dir)) throw FormatError("not a run directory: " + run);
    std::vector<fs::path> children;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (fs::exists(entry.path() / "evaluations.jsonl")) children.push_back(entry.path());
    }
    std::sort(children.begin(), children.end());
    for (const auto& c : children) {
      auto r = load_evaluations(c);
      rows.insert(rows.end(), r.begin(), r.end());
    }
  }
  const auto curve = learning_curve(rows);
  write_curve_csv(curve, a.out);
  std::cout << "wrote " << curve.size() << " curve points to " << a.out << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contextual reward shaping for multi-agent football defense"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1, 1);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train VDN defenders for every configured seed");
  t->add_option("--config", train.config, "Experiment config (JSON)")->required();
  t->add_option("--out", train.out, "Output directory")->required();
  t->add_option("--seeds", train.seeds, "Comma-separated seed list overriding the config");
  t->add_flag("--baseline", train.baseline, "Force shaping weight 0 (plain VDN)");
  t->add_option("--jobs", train.jobs, "Seeds trained in parallel")->check(CLI::PositiveNumber);

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Greedy evaluation of a checkpoint");
  e->add_option("--checkpoint", ev.checkpoint, "Checkpoint file")->required();
  e->add_option("--difficulty", ev.difficulty, "Attacker difficulty in [0,1]; -1 uses the training difficulty");
  e->add_option("--episodes", ev.episodes, "Episodes")->check(CLI::PositiveNumber);
  e->add_option("--seed", ev.seed, "Evaluation seed; -1 uses the run's evaluation seed");

  FitArgs fit;
  auto* f = app.add_subcommand("fit-pass-model", "Maximum-likelihood fit of the pass model");
  f->add_option("--events", fit.events, "CSV with header x,k")->required();
  f->add_option("--out", fit.out, "Output JSON")->required();
  f->add_option("--sigma0", fit.sigma0, "Initial sigma");
  f->add_option("--lambda0", fit.lambda0, "Initial lambda");
  f->add_option("--tol", fit.tol, "Gradient-norm tolerance");

  SolveArgs solve;
  auto* s = app.add_subcommand("solve-epv", "Solve the default possession chain into an EPV grid file");
  s->add_option("--spec", solve.spec, "Pitch spec JSON {length,width,grid_m,grid_n,goal_half_width}");
  s->add_option("--length", solve.pitch.length, "Pitch length (m)");
  s->add_option("--width", solve.pitch.width, "Pitch width (m)");
  s->add_option("--grid-m", solve.pitch.grid_m, "Cells along x");
  s->add_option("--grid-n", solve.pitch.grid_n, "Cells along y");
  s->add_option("--goal-half-width", solve.pitch.goal_half_width, "Goal half width (m)");
  s->add_option("--shot-max", solve.chain.shot_max, "Peak shot probability");
  s->add_option("--shot-scale", solve.chain.shot_scale, "Shot probability length scale (m)");
  s->add_option("--turnover", solve.chain.turnover, "Per-step turnover probability");
  s->add_option("--score-min", solve.chain.score_min, "Minimum score-given-shot probability");
  s->add_option("--score-max", solve.chain.score_max, "Maximum score-given-shot probability");
  s->add_option("--tol", solve.tol, "Value-iteration tolerance");
  s->add_option("--out", solve.out, "Output EPV grid JSON")->required();

  RenderArgs render;
  auto* r = app.add_subcommand("render-field", "Render a control / EPV / overlay field as PPM or SVG");
  auto* ck = r->add_option("--checkpoint", render.checkpoint, "Checkpoint: render a greedy replay frame");
  auto* st = r->add_option("--state", render.state, "State JSON, or replay JSONL with --frame");
  ck->excludes(st);
  r->add_option("--what", render.what, "control | epv | overlay")
      ->check(CLI::IsMember({"control", "epv", "overlay"}));
  r->add_option("--out", render.out, "Output image (.ppm or .svg)")->required();
  r->add_option("--epv", render.epv, "EPV grid file (default: solved default chain)");
  r->add_option("--frame", render.frame, "Frame index within a JSONL state file");
  r->add_option("--steps", render.steps, "Greedy steps to roll before rendering (with --checkpoint)");
  r->add_option("--seed", render.seed, "Episode seed (with --checkpoint)");

  ReplayArgs replay;
  auto* p = app.add_subcommand("replay", "Dump one greedy episode as JSON lines");
  p->add_option("--checkpoint", replay.checkpoint, "Checkpoint file")->required();
  p->add_option("--seed", replay.seed, "Episode seed");
  p->add_option("--out", replay.out, "Output JSONL")->required();
  p->add_option("--difficulty", replay.difficulty, "Attacker difficulty; -1 uses the training difficulty");

  CurveArgs curve;
  auto* c = app.add_subcommand("curve", "Median/quartile learning curve across seed runs");
  c->add_option("--runs", curve.runs, "Seed run directories or their parent")->required()->expected(1, -1);
  c->add_option("--out", curve.out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& h) {
    return app.exit(h);
  } catch (const CLI::CallForAllHelp& h) {
    return app.exit(h);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kExitConfig;
  }

  try {
    if (*t) return cmd_train(train);
    if (*e) return cmd_eval(ev);
    if (*f) return cmd_fit(fit);
    if (*s) return cmd_solve(solve, *s);
    if (*r) return cmd_render(render);
    if (*p) return cmd_replay(replay);
    if (*c) return cmd_curve(curve);
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}
