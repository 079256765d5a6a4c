// Acceptance gate: one PASS/FAIL line per criterion.
//   acceptance [--criterion N]... [--work DIR]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <thread>
#include <string>
#include <vector>

#include "matrix_game.hpp"
#include "oracles.hpp"
#include "pitchrl/config.hpp"
#include "pitchrl/epv.hpp"
#include "pitchrl/pitch_control.hpp"
#include "pitchrl/trainer.hpp"
#include "pitchrl/vdn.hpp"

using namespace pitchrl;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

fs::path g_work = fs::temp_directory_path() / "pitchrl-acceptance";

fs::path fresh_dir(const std::string& name) {
  const auto dir = g_work / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig desk_config() {
  return load_experiment_config(fs::path(PITCHRL_SOURCE_DIR) / "configs" / "desk.json");
}

// 1. Game-state EPV equals the explicit double sum.
void game_state_epv_sum(Verdict& o) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> dim(2, 64);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int m = trial == 0 ? 64 : dim(rng);
    const int n = trial == 0 ? 64 : dim(rng);
    EPVGrid grid{m, n, {}};
    ScalarField field;
    field.spec.grid_m = m;
    field.spec.grid_n = n;
    for (int k = 0; k < m * n; ++k) {
      grid.values.push_back(u(rng));
      field.values.push_back(u(rng));
    }
    const double got = game_state_epv(field, grid);
    const double want = oracle::double_sum(oracle::unflatten(grid.values, m, n), oracle::unflatten(field.values, m, n));
    worst = std::max(worst, std::abs(got - want) / std::abs(want));
  }
  o.require(worst <= 1e-12, "relative error <= 1e-12");

  const EPVGrid g{2, 2, {0.1, 0.2, 0.3, 0.4}};
  auto field = [](std::vector<double> v) {
    ScalarField f;
    f.spec.grid_m = 2;
    f.spec.grid_n = 2;
    f.values = std::move(v);
    return f;
  };
  o.require(game_state_epv(field({1, 1, 1, 1}), g) == 0.1 + 0.2 + 0.3 + 0.4, "unit field gives grid mass");
  o.require(game_state_epv(field({0, 0, 0, 0}), g) == 0.0, "zero field gives 0");
  o.require(game_state_epv(field({1, 0, 0, 0.5}), g) == 0.1 * 1 + 0.4 * 0.5, "2x2 example = 0.30");
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 1.0, "runtime < 1 s");
  o.detail << "max rel err " << worst << ", " << elapsed << " s";
}

// 2. Pass-model MLE recovers the generator; gradient matches differences.
void pass_model_mle(Verdict& o) {
  const auto t0 = Clock::now();
  const PassModelParams truth{0.45, 0.2};
  const auto events = generate_pass_events(truth, 10'000, 2024);
  const auto fit = fit_pass_model(events, PassModelParams{});
  const double es = std::abs(fit.sigma - truth.sigma) / truth.sigma;
  const double el = std::abs(fit.lambda - truth.lambda) / truth.lambda;
  o.require(es <= 0.10, "sigma within 10%");
  o.require(el <= 0.10, "lambda within 10%");

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> sig(0.2, 1.5), lam(-1.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const PassModelParams at{sig(rng), lam(rng)};
    const auto g = log_likelihood_gradient(at, events);
    const auto fd = oracle::central_difference(
        [&](const std::vector<double>& v) { return log_likelihood({v[0], v[1]}, events); },
        {at.sigma, at.lambda}, 1e-6);
    for (int c = 0; c < 2; ++c) {
      worst = std::max(worst, std::abs(g[c] - fd[c]) / std::max({std::abs(g[c]), std::abs(fd[c]), 1e-3}));
    }
  }
  o.require(worst <= 1e-6, "gradient matches central differences to 1e-6");
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 10.0, "runtime < 10 s");
  o.detail << "sigma " << fit.sigma << " (" << 100 * es << "%), lambda " << fit.lambda << " (" << 100 * el
           << "%), grad err " << worst << ", " << elapsed << " s";
}

// 3. Value iteration against a dense solve and a Monte Carlo oracle.
void epv_solver(Verdict& o) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(303);
  double worst_linear = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto chain = oracle::random_chain(4, 4, rng);
    const auto vi = solve_epv(chain, {1e-12, 1'000'000});
    const auto direct = oracle::linear_solve_epv(chain);
    for (std::size_t c = 0; c < direct.size(); ++c) {
      worst_linear = std::max(worst_linear, std::abs(vi.values[c] - direct[c]));
    }
  }
  o.require(worst_linear <= 1e-8, "matches linear solve to 1e-8");

  const auto chain = oracle::random_chain(3, 3, rng);
  const auto vi = solve_epv(chain);
  const auto mc = oracle::monte_carlo_epv(chain, 1'000'000, 909);
  double worst_mc = 0.0;
  for (std::size_t c = 0; c < mc.size(); ++c) worst_mc = std::max(worst_mc, std::abs(vi.values[c] - mc[c]));
  o.require(worst_mc <= 1e-2, "matches 10^6-rollout Monte Carlo within 1e-2");
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 60.0, "runtime < 60 s");
  o.detail << "linear max err " << worst_linear << ", MC max err " << worst_mc << ", " << elapsed << " s";
}

// 4. Pitch-control field range, complement, symmetry and monotonicity.
void pitch_control_field(Verdict& o) {
  const auto t0 = Clock::now();
  PitchSpec spec;
  const PassModelParams params{};
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> ux(0.0, spec.length), uy(0.0, spec.width), frac(0.05, 0.95);
  std::uniform_int_distribution<int> count(1, 5), ci(0, spec.grid_m - 1), cj(0, spec.grid_n - 1);
  bool in_range = true, complement = true, monotone = true;
  for (int trial = 0; trial < 1000; ++trial) {
    GameState s;
    const int defenders = count(rng);
    for (int k = 0; k < defenders; ++k) {
      PlayerState p;
      p.id = k;
      p.team = Team::Defending;
      p.position = {ux(rng), uy(rng)};
      p.max_speed = 8.0;
      p.reaction_time = 0.5;
      s.players.push_back(p);
    }
    PlayerState att;
    att.id = defenders;
    att.team = Team::Attacking;
    att.position = {ux(rng), uy(rng)};
    att.max_speed = 7.5;
    att.reaction_time = 0.5;
    s.players.push_back(att);

    const auto field = compute_control_field(s, spec, params);
    for (int i = 0; i < spec.grid_m; ++i) {
      for (int j = 0; j < spec.grid_n; ++j) {
        const double a = field.at(i, j);
        in_range = in_range && a >= 0.0 && a <= 1.0;
        complement = complement && field.defending_at(i, j) == 1.0 - a && a + field.defending_at(i, j) == 1.0;
      }
    }
    // Move the only attacker part of the way toward a random cell.
    const int i = ci(rng), j = cj(rng);
    const Vec2 cell = spec.cell_center(i, j);
    GameState closer = s;
    auto& moved = closer.players.back().position;
    moved = moved + (cell - moved) * frac(rng);
    const double before = field.at(i, j);
    const double after = compute_control_field(closer, spec, params).at(i, j);
    monotone = monotone && after >= before;
  }
  o.require(in_range, "all values in [0,1]");
  o.require(complement, "complement identity exact");
  o.require(monotone, "attacker-approach monotonicity on 1000 configurations");

  GameState sym;
  const Vec2 cell = spec.cell_center(9, 6);
  PlayerState d;
  d.team = Team::Defending;
  d.position = cell + Vec2{-7.0, 3.0};
  d.max_speed = 8.0;
  d.reaction_time = 0.5;
  PlayerState a = d;
  a.id = 1;
  a.team = Team::Attacking;
  a.position = cell + Vec2{7.0, -3.0};
  sym.players = {d, a};
  const double mid = compute_control_field(sym, spec, params).at(9, 6);
  o.require(std::abs(mid - 0.5) <= 1e-12, "symmetric example is 0.5");
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 5.0, "runtime < 5 s");
  o.detail << "symmetric cell " << mid << ", " << elapsed << " s";
}

// 5. VDN additivity, decomposed argmax and TD gradients.
void vdn_structure(Verdict& o) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  bool additive = true;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> q(1 + trial % 6);
    double sum = 0.0;
    for (auto& v : q) {
      v = u(rng);
      sum += v;
    }
    additive = additive && joint_q(q) == sum;
  }
  o.require(additive, "joint Q is the exact sum");

  long instances = 0;
  bool argmax_ok = true;
  std::uniform_int_distribution<int> small(-2, 2);
  for (int agents = 1; agents <= 3; ++agents) {
    for (int actions = 1; actions <= 4; ++actions) {
      for (int trial = 0; trial < 200; ++trial) {
        std::vector<QNetwork> nets;
        std::vector<std::vector<double>> obs, q;
        for (int a = 0; a < agents; ++a) {
          if (trial % 4 == 0) {
            // Integer output biases over a zero body produce exact ties.
            QNetwork net = QNetwork::zeros({3, 4, actions});
            auto p = net.parameters();
            for (int k = 0; k < actions; ++k) p[p.size() - static_cast<std::size_t>(actions - k)] = small(rng);
            net.set_parameters(p);
            nets.push_back(net);
          } else {
            nets.emplace_back(std::vector<int>{3, 5, actions}, rng);
          }
          obs.push_back({u(rng), u(rng), u(rng)});
          const auto v = nets.back().forward(obs.back());
          q.emplace_back(v.data(), v.data() + v.size());
        }
        argmax_ok = argmax_ok && select_actions(nets, obs, 0.0, rng) == oracle::brute_force_joint_argmax(q);
        ++instances;
      }
    }
  }
  o.require(argmax_ok, "decomposed argmax equals brute force");

  double worst = 0.0;
  for (int trial = 0; trial < 6; ++trial) {
    const int agents = 1 + trial % 3;
    std::vector<QNetwork> nets, target;
    for (int a = 0; a < agents; ++a) {
      nets.emplace_back(std::vector<int>{5, 7, 6, 4}, rng);
      target.emplace_back(std::vector<int>{5, 7, 6, 4}, rng);
    }
    std::vector<Transition> batch(9);
    std::uniform_int_distribution<int> act(0, 3);
    for (std::size_t b = 0; b < batch.size(); ++b) {
      for (int a = 0; a < agents; ++a) {
        std::vector<double> x(5), y(5);
        for (auto& v : x) v = u(rng);
        for (auto& v : y) v = u(rng);
        batch[b].obs.push_back(x);
        batch[b].next_obs.push_back(y);
        batch[b].actions.push_back(act(rng));
      }
      batch[b].reward = u(rng);
      batch[b].terminal = b % 4 == 0;
    }
    std::vector<const Transition*> ptrs;
    for (const auto& t : batch) ptrs.push_back(&t);
    const auto g = td_gradient(nets, target, ptrs, 0.9);
    for (int a = 0; a < agents; ++a) {
      const auto fd = oracle::central_difference(
          [&](const std::vector<double>& params) {
            auto copy = nets;
            copy[static_cast<std::size_t>(a)].set_parameters(params);
            return td_gradient(copy, target, ptrs, 0.9).loss;
          },
          nets[static_cast<std::size_t>(a)].parameters(), 1e-6);
      for (std::size_t k = 0; k < fd.size(); ++k) {
        const double an = g.grads[static_cast<std::size_t>(a)][k];
        worst = std::max(worst, std::abs(an - fd[k]) / std::max({std::abs(an), std::abs(fd[k]), 1e-5}));
      }
    }
  }
  o.require(worst <= 1e-4, "TD gradient relative error <= 1e-4");
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 30.0, "runtime < 30 s");
  o.detail << instances << " argmax instances, grad rel err " << worst << ", " << elapsed << " s";
}

// 6. Matrix-game learning sanity over five seeds.
void learning_sanity(Verdict& o) {
  const auto t0 = Clock::now();
  int solved = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto u = matrix_game::train(seed, 5000);
    solved += u[0] == matrix_game::kOptimum[0] && u[1] == matrix_game::kOptimum[1] ? 1 : 0;
  }
  o.require(solved == 5, "optimal joint action for all 5 seeds");
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 60.0, "runtime < 60 s");
  o.detail << solved << "/5 seeds optimal, " << elapsed << " s";
}

// 7. Shaped training beats (or ties) plain VDN at every difficulty.
void shaping_direction(Verdict& o) {
  const auto t0 = Clock::now();
  ExperimentConfig shaped = desk_config();
  ExperimentConfig plain = shaped;
  plain.reward.shaping_weight = 0.0;
  o.require(shaped.scenario.n_defenders == 2 && shaped.scenario.n_attackers == 3, "2v3 scenario");
  o.require(shaped.scenario.difficulty == 0.95, "trained at difficulty 0.95");
  o.require(shaped.train.total_steps == 200'000, "200k steps");
  o.require(shaped.seeds.size() == 3, "3 seeds");
  o.require(shaped.eval_episodes == 32, "32 evaluation episodes");
  o.require(shaped.reward.shaping_weight > 0.0, "shaped config has w > 0");

  const int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const auto dir = fresh_dir("shaping-direction");
  const auto a = run_training(shaped, dir / "shaped", jobs);
  const auto b = run_training(plain, dir / "plain", jobs);

  // Final mean goal difference per (difficulty, seed).
  auto finals = [](const std::vector<SeedRunResult>& runs) {
    std::map<double, std::vector<double>> out;
    for (const auto& r : runs) {
      for (const auto& row : r.evaluations) {
        if (row.final) out[row.difficulty].push_back(row.mean_goal_difference);
      }
    }
    return out;
  };
  for (const auto& r : a) o.require(!r.failed, "shaped seed " + std::to_string(r.seed) + " trained");
  for (const auto& r : b) o.require(!r.failed, "plain seed " + std::to_string(r.seed) + " trained");
  const auto fa = finals(a);
  const auto fb = finals(b);
  for (double d : {0.95, 0.6, 0.05}) {
    if (!fa.count(d) || !fb.count(d) || fa.at(d).size() != 3 || fb.at(d).size() != 3) {
      o.require(false, "final evaluations at difficulty " + std::to_string(d));
      continue;
    }
    double ma = 0.0, mb = 0.0;
    for (int k = 0; k < 3; ++k) {
      ma += fa.at(d)[k] / 3.0;
      mb += fb.at(d)[k] / 3.0;
    }
    o.detail << "d=" << d << ": shaped " << ma << " vs plain " << mb;
    if (d == 0.95) {
      int wins = 0;
      o.detail << " (per seed";
      for (int k = 0; k < 3; ++k) {
        wins += fa.at(d)[k] >= fb.at(d)[k] ? 1 : 0;
        o.detail << ' ' << fa.at(d)[k] << '/' << fb.at(d)[k];
      }
      o.detail << ")";
      o.require(wins >= 2, "hard: shaped >= plain on at least 2 of 3 paired seeds");
    }
    o.require(ma >= mb, "shaped mean >= plain mean at difficulty " + std::to_string(d));
    o.detail << "; ";
  }
  const double elapsed = seconds_since(t0);
  o.detail << elapsed << " s";
  if (elapsed >= 1800.0) o.detail << " (above the 30 min target)";
}

// 8. Byte-identical metrics from two single-threaded 20k-step runs.
void reproducibility(Verdict& o) {
  const auto t0 = Clock::now();
  ExperimentConfig c = desk_config();
  c.train.total_steps = 20'000;
  c.seeds = {c.seeds.front()};
  const auto dir = fresh_dir("reproducibility");
  const auto r1 = run_training(c, dir / "one", 1);
  const auto r2 = run_training(c, dir / "two", 1);
  const std::string m1 = slurp(r1.front().run_dir / "metrics.jsonl");
  const std::string m2 = slurp(r2.front().run_dir / "metrics.jsonl");
  o.require(!m1.empty(), "metrics log written");
  o.require(m1 == m2, "metrics logs byte-identical");
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 360.0, "two runs < 3 min each");
  o.detail << m1.size() << " bytes, " << elapsed << " s for both runs";
}

// 9. EPV grid and checkpoint round trips; reloaded evaluation matches.
void round_trips(Verdict& o) {
  const auto t0 = Clock::now();
  const auto dir = fresh_dir("round-trips");
  const EPVGrid grid = solve_epv(default_chain(PitchSpec{}));
  save_epv(grid, dir / "epv.json");
  o.require(load_epv(dir / "epv.json") == grid, "EPV grid round trip exact");

  ExperimentConfig c = desk_config();
  c.train.total_steps = 5000;
  c.seeds = {c.seeds.front()};
  const auto runs = run_training(c, dir / "run", 1);
  const auto& run = runs.front();
  const Checkpoint ckpt = load_checkpoint(run.run_dir / "final.json");
  o.require(ckpt.nets == run.final_nets, "checkpoint networks exact");
  o.require(ckpt.step == c.train.total_steps, "checkpoint step");
  save_checkpoint(ckpt, dir / "again.json");
  o.require(slurp(dir / "again.json") == slurp(run.run_dir / "final.json"), "checkpoint re-save byte-identical");

  const ExperimentConfig echoed = experiment_config_from_json(ckpt.config);
  const EPVGrid g = resolve_epv_grid(echoed);
  int episodes = 0;
  for (const auto& row : run.evaluations) {
    if (!row.final) continue;
    const auto memory = evaluate_policy(run.final_nets, c, g, row.difficulty, c.eval_episodes, evaluation_seed(run.seed));
    const auto disk = evaluate(run.run_dir / "final.json", row.difficulty, c.eval_episodes);
    bool same = memory.records.size() == disk.records.size();
    for (std::size_t k = 0; same && k < disk.records.size(); ++k) {
      same = to_json(memory.records[k]) == to_json(disk.records[k]);
    }
    o.require(same, "episode-for-episode match at difficulty " + std::to_string(row.difficulty));
    o.require(disk.mean_goal_difference == row.mean_goal_difference, "matches the logged final evaluation");
    episodes += static_cast<int>(disk.records.size());
  }
  o.require(episodes > 0, "final evaluations present");
  o.detail << episodes << " reloaded episodes compared, " << seconds_since(t0) << " s";
}

struct Criterion {
  int number;
  const char* name;
  std::function<void(Verdict&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "game-state EPV double sum", game_state_epv_sum},
      {2, "pass-model MLE", pass_model_mle},
      {3, "EPV solver", epv_solver},
      {4, "pitch-control field", pitch_control_field},
      {5, "VDN structure", vdn_structure},
      {6, "learning sanity", learning_sanity},
      {7, "shaped >= plain at desk scale", shaping_direction},
      {8, "reproducibility", reproducibility},
      {9, "round trips", round_trips},
  };
  std::vector<int> selected;
  for (int k = 1; k < argc; ++k) {
    if (std::strcmp(argv[k], "--criterion") == 0 && k + 1 < argc) {
      selected.push_back(std::atoi(argv[++k]));
    } else if (std::strcmp(argv[k], "--work") == 0 && k + 1 < argc) {
      g_work = argv[++k];
    } else {
      std::cerr << "usage: acceptance [--criterion N]... [--work DIR]\n";
      return 2;
    }
  }
  int failures = 0;
  for (const auto& c : all) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.number) == selected.end()) continue;
    Verdict o;
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    std::cout << "criterion " << c.number << " (" << c.name << "): " << (o.pass ? "PASS" : "FAIL") << " - "
              << o.detail.str() << std::endl;
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
