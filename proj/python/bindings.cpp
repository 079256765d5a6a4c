#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "pitchrl/config.hpp"
#include "pitchrl/epv.hpp"
#include "pitchrl/errors.hpp"
#include "pitchrl/pitch_control.hpp"
#include "pitchrl/reward.hpp"
#include "pitchrl/sim_core.hpp"
#include "pitchrl/trainer.hpp"
#include "pitchrl/vdn.hpp"

namespace py = pybind11;
using namespace pitchrl;

namespace {

py::array_t<double> grid_array(const std::vector<double>& values, int m, int n) {
  py::array_t<double> out({m, n});
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

std::vector<double> flatten(const py::array_t<double, py::array::c_style | py::array::forcecast>& a, int& m, int& n) {
  if (a.ndim() != 2) throw DimensionMismatch("expected a 2-D array");
  m = static_cast<int>(a.shape(0));
  n = static_cast<int>(a.shape(1));
  return {a.data(), a.data() + a.size()};
}

// Python-friendly environment wrapper holding the current state.
class Environment {
 public:
  Environment(const ScenarioConfig& scenario, std::uint64_t seed) : state_(reset(scenario, seed)) {}

  py::dict step(const std::vector<int>& actions) {
    std::vector<DefenderAction> a;
    for (int i : actions) a.push_back(DefenderAction::from_index(i));
    const StepEvents ev = pitchrl::step(state_, a);
    py::dict d;
    d["goal"] = ev.goal;
    d["out_of_bounds"] = ev.out_of_bounds;
    d["turnover"] = ev.turnover;
    d["tackle"] = ev.tackle;
    d["foul"] = ev.foul;
    d["terminal"] = ev.terminal;
    d["sparse_reward"] = sparse_reward(ev);
    return d;
  }
  std::vector<double> observe() const { return pitchrl::observe(state_); }
  bool terminal() const { return state_.terminal(); }
  int step_index() const { return state_.step_index; }
  std::string state_json() const { return state_to_json(state_).dump(); }
  std::optional<int> goal_difference() const {
    if (!state_.outcome) return std::nullopt;
    return state_.outcome->goal_difference;
  }
  const GameState& state() const { return state_; }

 private:
  GameState state_;
};

}  // namespace

PYBIND11_MODULE(_pitchrl, m) {
  m.doc() = "C++ core of the contextual reward-shaping laboratory";
  m.attr("__version__") = "0.1.0";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<InsufficientData>(m, "InsufficientData", base.ptr());
  py::register_exception<NonConvergence>(m, "NonConvergence", base.ptr());
  py::register_exception<NonStochasticChain>(m, "NonStochasticChain", base.ptr());
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<ShapeMismatch>(m, "ShapeMismatch", base.ptr());
  py::register_exception<EmptyLog>(m, "EmptyLog", base.ptr());

  py::class_<PitchSpec>(m, "PitchSpec")
      .def(py::init<>())
      .def_readwrite("length", &PitchSpec::length)
      .def_readwrite("width", &PitchSpec::width)
      .def_readwrite("grid_m", &PitchSpec::grid_m)
      .def_readwrite("grid_n", &PitchSpec::grid_n)
      .def_readwrite("goal_half_width", &PitchSpec::goal_half_width);

  py::class_<SimConstants>(m, "SimConstants")
      .def(py::init<>())
#define PITCHRL_BIND_CONSTANT(name) .def_readwrite(#name, &SimConstants::name)
      PITCHRL_BIND_CONSTANT(defender_max_speed) PITCHRL_BIND_CONSTANT(attacker_max_speed)
      PITCHRL_BIND_CONSTANT(dribble_speed) PITCHRL_BIND_CONSTANT(reaction_time)
      PITCHRL_BIND_CONSTANT(tackle_radius) PITCHRL_BIND_CONSTANT(tackle_success)
      PITCHRL_BIND_CONSTANT(foul_probability) PITCHRL_BIND_CONSTANT(beaten_time)
      PITCHRL_BIND_CONSTANT(press_radius) PITCHRL_BIND_CONSTANT(scoring_zone)
      PITCHRL_BIND_CONSTANT(shooting_range) PITCHRL_BIND_CONSTANT(pass_speed)
      PITCHRL_BIND_CONSTANT(shot_speed) PITCHRL_BIND_CONSTANT(noise_max)
      PITCHRL_BIND_CONSTANT(control_radius) PITCHRL_BIND_CONSTANT(intercept_probability)
      PITCHRL_BIND_CONSTANT(block_probability) PITCHRL_BIND_CONSTANT(keeper_reach)
      PITCHRL_BIND_CONSTANT(loose_ball_decay) PITCHRL_BIND_CONSTANT(decision_period);
#undef PITCHRL_BIND_CONSTANT

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init<>())
      .def_readwrite("n_defenders", &ScenarioConfig::n_defenders)
      .def_readwrite("n_attackers", &ScenarioConfig::n_attackers)
      .def_readwrite("difficulty", &ScenarioConfig::difficulty)
      .def_readwrite("max_episode_steps", &ScenarioConfig::max_episode_steps)
      .def_readwrite("dt", &ScenarioConfig::dt)
      .def_readwrite("pitch", &ScenarioConfig::pitch)
      .def_readwrite("constants", &ScenarioConfig::constants);

  py::class_<PassModelParams>(m, "PassModelParams")
      .def(py::init<>())
      .def(py::init([](double sigma, double lambda) { return PassModelParams{sigma, lambda}; }),
           py::arg("sigma"), py::arg("lambda_"))
      .def_readwrite("sigma", &PassModelParams::sigma)
      .def_readwrite("lambda_", &PassModelParams::lambda)
      .def("__repr__", [](const PassModelParams& p) {
        return "PassModelParams(sigma=" + std::to_string(p.sigma) + ", lambda_=" + std::to_string(p.lambda) + ")";
      });

  m.def("pass_success_probability", &pass_success_probability, py::arg("params"), py::arg("x"));

  auto to_events = [](const std::vector<double>& x, const std::vector<int>& k) {
    if (x.size() != k.size()) throw DimensionMismatch("x and k must have equal length");
    std::vector<PassEvent> events(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) events[i] = {x[i], k[i]};
    return events;
  };
  m.def(
      "fit_pass_model",
      [to_events](const std::vector<double>& x, const std::vector<int>& k, const PassModelParams& init, double tol) {
        return fit_pass_model(to_events(x, k), init, {tol, 200});
      },
      py::arg("x"), py::arg("k"), py::arg("init") = PassModelParams{}, py::arg("tol") = 1e-8);
  m.def(
      "log_likelihood",
      [to_events](const PassModelParams& p, const std::vector<double>& x, const std::vector<int>& k) {
        return log_likelihood(p, to_events(x, k));
      },
      py::arg("params"), py::arg("x"), py::arg("k"));
  m.def(
      "generate_pass_events",
      [](const PassModelParams& truth, std::size_t count, std::uint64_t seed) {
        const auto events = generate_pass_events(truth, count, seed);
        std::vector<double> x;
        std::vector<int> k;
        for (const auto& e : events) {
          x.push_back(e.x);
          k.push_back(e.k);
        }
        return py::make_tuple(x, k);
      },
      py::arg("truth"), py::arg("count"), py::arg("seed"));

  m.def(
      "arrival_time",
      [](double px, double py_, double max_speed, double reaction, double tx, double ty) {
        PlayerState p;
        p.position = {px, py_};
        p.max_speed = max_speed;
        p.reaction_time = reaction;
        return arrival_time(p, {tx, ty});
      },
      py::arg("x"), py::arg("y"), py::arg("max_speed"), py::arg("reaction_time"), py::arg("target_x"),
      py::arg("target_y"));

  py::class_<Environment>(m, "Environment")
      .def(py::init<const ScenarioConfig&, std::uint64_t>(), py::arg("scenario"), py::arg("seed"))
      .def("step", &Environment::step, py::arg("actions"))
      .def("observe", &Environment::observe)
      .def_property_readonly("terminal", &Environment::terminal)
      .def_property_readonly("step_index", &Environment::step_index)
      .def_property_readonly("goal_difference", &Environment::goal_difference)
      .def("state_json", &Environment::state_json)
      .def(
          "control_field",
          [](const Environment& env, const PassModelParams& params) {
            const auto& s = env.state();
            const auto f = compute_control_field(s, s.scenario.pitch, params);
            return grid_array(f.values, f.spec.grid_m, f.spec.grid_n);
          },
          py::arg("params") = PassModelParams{});
  m.def("observation_size", &observation_size, py::arg("scenario"));

  m.def(
      "default_epv_grid",
      [](const PitchSpec& spec) {
        const EPVGrid g = solve_epv(default_chain(spec));
        return grid_array(g.values, g.m, g.n);
      },
      py::arg("spec") = PitchSpec{});
  m.def(
      "game_state_epv",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> field,
         py::array_t<double, py::array::c_style | py::array::forcecast> grid) {
        int fm = 0, fn = 0, gm = 0, gn = 0;
        ScalarField f;
        f.values = flatten(field, fm, fn);
        f.spec.grid_m = fm;
        f.spec.grid_n = fn;
        EPVGrid g;
        g.values = flatten(grid, gm, gn);
        g.m = gm;
        g.n = gn;
        return game_state_epv(f, g);
      },
      py::arg("field"), py::arg("grid"));
  m.def(
      "load_epv",
      [](const std::filesystem::path& p) {
        const EPVGrid g = load_epv(p);
        return grid_array(g.values, g.m, g.n);
      },
      py::arg("path"));

  py::enum_<ShapingMode>(m, "ShapingMode")
      .value("Additive", ShapingMode::Additive)
      .value("PotentialBased", ShapingMode::PotentialBased);
  py::class_<RewardConfig>(m, "RewardConfig")
      .def(py::init<>())
      .def_readwrite("shaping_weight", &RewardConfig::shaping_weight)
      .def_readwrite("mode", &RewardConfig::mode)
      .def_readwrite("gamma", &RewardConfig::gamma);
  m.def("shaped_reward", &shaped_reward, py::arg("sparse"), py::arg("epv_prev"), py::arg("epv_curr"),
        py::arg("config"));

  m.def("joint_q", [](const std::vector<double>& q) { return joint_q(q); }, py::arg("per_agent_q"));

  m.def("percentile", &percentile, py::arg("values"), py::arg("q"));
  m.def(
      "learning_curve",
      [](const std::vector<std::filesystem::path>& runs) {
        std::vector<EvaluationRow> rows;
        for (const auto& r : runs) {
          auto more = load_evaluations(r);
          rows.insert(rows.end(), more.begin(), more.end());
        }
        std::vector<py::tuple> out;
        for (const auto& p : learning_curve(rows)) out.push_back(py::make_tuple(p.step, p.median, p.q25, p.q75));
        return out;
      },
      py::arg("run_dirs"));

  m.def(
      "run_training",
      [](const std::string& config_json, const std::filesystem::path& out_dir, int jobs) {
        const auto config = experiment_config_from_json(nlohmann::json::parse(config_json));
        std::vector<std::filesystem::path> dirs;
        {
          py::gil_scoped_release release;
          for (const auto& r : run_training(config, out_dir, jobs)) dirs.push_back(r.run_dir);
        }
        return dirs;
      },
      py::arg("config_json"), py::arg("out_dir"), py::arg("jobs") = 1);
  m.def(
      "evaluate",
      [](const std::filesystem::path& checkpoint, double difficulty, int episodes, std::optional<std::uint64_t> seed) {
        const auto r = evaluate(checkpoint, difficulty, episodes, seed);
        std::vector<int> gd;
        for (const auto& rec : r.records) gd.push_back(rec.goal_difference);
        return py::make_tuple(r.mean_goal_difference, gd);
      },
      py::arg("checkpoint"), py::arg("difficulty"), py::arg("episodes") = 32, py::arg("seed") = py::none());
}
