#include "pitchrl/pitch_control.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "pitchrl/errors.hpp"

namespace pitchrl {

namespace {

// log(1 + exp(v)) without overflow.
double softplus(double v) {
  if (v > 0.0) return v + std::log1p(std::exp(-v));
  return std::log1p(std::exp(v));
}

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Mean log-likelihood in the natural logistic-regression coordinates
// p = logistic(slope * x + intercept).
double natural_log_likelihood(double slope, double intercept, std::span<const PassEvent> events) {
  double sum = 0.0;
  for (const auto& e : events) {
    const double z = slope * e.x + intercept;
    sum += e.k == 1 ? -softplus(-z) : -softplus(z);
  }
  return sum / static_cast<double>(events.size());
}

}  // namespace

void PassModelParams::validate() const {
  if (!std::isfinite(sigma) || !std::isfinite(lambda) || sigma <= 0.0) {
    throw ConfigError("pass_model: sigma must be finite and > 0, lambda finite");
  }
}

double pass_success_probability(const PassModelParams& params, double x) {
  return logistic((x - params.lambda) / params.sigma);
}

double log_likelihood(const PassModelParams& params, std::span<const PassEvent> events) {
  if (events.empty()) throw InsufficientData("log_likelihood: no events");
  return natural_log_likelihood(1.0 / params.sigma, -params.lambda / params.sigma, events);
}

std::array<double, 2> log_likelihood_gradient(const PassModelParams& params,
                                              std::span<const PassEvent> events) {
  if (events.empty()) throw InsufficientData("log_likelihood_gradient: no events");
  double d_sigma = 0.0;
  double d_lambda = 0.0;
  for (const auto& e : events) {
    const double z = (e.x - params.lambda) / params.sigma;
    const double residual = static_cast<double>(e.k) - logistic(z);
    d_sigma += residual * (-z / params.sigma);
    d_lambda += residual * (-1.0 / params.sigma);
  }
  const double n = static_cast<double>(events.size());
  return {d_sigma / n, d_lambda / n};
}

PassModelParams fit_pass_model(std::span<const PassEvent> events, const PassModelParams& init,
                               const FitOptions& options) {
  init.validate();
  if (events.empty()) throw InsufficientData("fit_pass_model: empty event list");
  bool has_success = false;
  bool has_failure = false;
  double min_success = std::numeric_limits<double>::infinity();
  double max_failure = -std::numeric_limits<double>::infinity();
  for (const auto& e : events) {
    if (e.k != 0 && e.k != 1) throw FormatError("fit_pass_model: outcome k must be 0 or 1");
    if (!std::isfinite(e.x)) throw FormatError("fit_pass_model: feature x must be finite");
    (e.k == 1 ? has_success : has_failure) = true;
    if (e.k == 1) min_success = std::min(min_success, e.x);
    else max_failure = std::max(max_failure, e.x);
  }
  if (!has_success || !has_failure) {
    throw InsufficientData("fit_pass_model: events contain a single outcome class");
  }
  // Classes split by a threshold: the likelihood keeps rising as sigma -> 0.
  if (max_failure <= min_success) {
    throw InsufficientData("fit_pass_model: outcomes are separated by x; no interior maximum");
  }

  // Newton ascent with backtracking on the concave natural parameterization;
  // the map (sigma, lambda) -> (1/sigma, -lambda/sigma) is a diffeomorphism
  // on sigma > 0, so stationary points coincide.
  double slope = 1.0 / init.sigma;
  double intercept = -init.lambda / init.sigma;
  double current = natural_log_likelihood(slope, intercept, events);
  const double n = static_cast<double>(events.size());

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const PassModelParams params{1.0 / slope, -intercept / slope};
    const auto grad = log_likelihood_gradient(params, events);
    if (std::hypot(grad[0], grad[1]) <= options.tol) return params;

    double g0 = 0.0, g1 = 0.0, h00 = 0.0, h01 = 0.0, h11 = 0.0;
    for (const auto& e : events) {
      const double p = logistic(slope * e.x + intercept);
      const double r = static_cast<double>(e.k) - p;
      const double w = p * (1.0 - p);
      g0 += r * e.x;
      g1 += r;
      h00 += w * e.x * e.x;
      h01 += w * e.x;
      h11 += w;
    }
    g0 /= n, g1 /= n, h00 /= n, h01 /= n, h11 /= n;
    const double det = h00 * h11 - h01 * h01;
    double d0 = g0, d1 = g1;  // gradient direction if the curvature degenerates
    if (det > 1e-300) {
      d0 = (h11 * g0 - h01 * g1) / det;
      d1 = (h00 * g1 - h01 * g0) / det;
    }

    double step = 1.0;
    bool improved = false;
    for (int k = 0; k < 60; ++k, step *= 0.5) {
      const double s = slope + step * d0;
      const double b = intercept + step * d1;
      if (s <= 0.0) continue;
      const double candidate = natural_log_likelihood(s, b, events);
      if (candidate >= current) {
        slope = s;
        intercept = b;
        improved = candidate > current;
        current = candidate;
        break;
      }
    }
    if (!improved) {
      const PassModelParams stuck{1.0 / slope, -intercept / slope};
      const auto g = log_likelihood_gradient(stuck, events);
      if (std::hypot(g[0], g[1]) <= options.tol) return stuck;
      throw NonConvergence("fit_pass_model: line search stalled before reaching tolerance");
    }
  }
  throw NonConvergence("fit_pass_model: no convergence after " +
                       std::to_string(options.max_iterations) + " iterations");
}

std::vector<PassEvent> generate_pass_events(const PassModelParams& truth, std::size_t count,
                                            std::uint64_t seed, double x_mean, double x_std) {
  truth.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> feature(x_mean, x_std);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<PassEvent> events;
  events.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = feature(rng);
    events.push_back({x, coin(rng) < pass_success_probability(truth, x) ? 1 : 0});
  }
  return events;
}

std::vector<PassEvent> load_pass_events(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open pass events file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty pass events file: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,k") throw FormatError("pass events header must be 'x,k' in " + path.string());
  std::vector<PassEvent> events;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    PassEvent e;
    try {
      if (comma == std::string::npos) throw std::invalid_argument("missing comma");
      std::size_t used = 0;
      e.x = std::stod(line.substr(0, comma), &used);
      const std::string k = line.substr(comma + 1);
      if (k != "0" && k != "1") throw std::invalid_argument("k not in {0,1}");
      e.k = k == "1" ? 1 : 0;
    } catch (const std::exception&) {
      throw FormatError("malformed pass event at " + path.string() + ":" + std::to_string(line_no));
    }
    if (!std::isfinite(e.x)) {
      throw FormatError("non-finite x at " + path.string() + ":" + std::to_string(line_no));
    }
    events.push_back(e);
  }
  return events;
}

void save_pass_events(std::span<const PassEvent> events, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write pass events file: " + path.string());
  out.precision(17);
  out << "x,k\n";
  for (const auto& e : events) out << e.x << ',' << e.k << '\n';
}

double arrival_time(const PlayerState& player, Vec2 target) {
  const double d = distance(player.position, target);
  if (player.max_speed <= 0.0) {
    return d == 0.0 ? player.reaction_time : std::numeric_limits<double>::infinity();
  }
  return player.reaction_time + d / player.max_speed;
}

ScalarField compute_control_field(const GameState& state, const PitchSpec& spec,
                                  const PassModelParams& params) {
  bool any_defender = false;
  bool any_attacker = false;
  for (const auto& p : state.players) (p.team == Team::Attacking ? any_attacker : any_defender) = true;
  if (!any_defender || !any_attacker) {
    throw ConfigError("compute_control_field: need at least one player per team");
  }
  ScalarField field{spec, {}, state.step_index};
  field.values.resize(static_cast<std::size_t>(spec.grid_m * spec.grid_n));
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (int i = 0; i < spec.grid_m; ++i) {
    for (int j = 0; j < spec.grid_n; ++j) {
      const Vec2 c = spec.cell_center(i, j);
      double t_def = inf;
      double t_att = inf;
      for (const auto& p : state.players) {
        double& best = p.team == Team::Attacking ? t_att : t_def;
        best = std::min(best, arrival_time(p, c));
      }
      field.values[static_cast<std::size_t>(i * spec.grid_n + j)] =
          pass_success_probability(params, t_def - t_att);
    }
  }
  return field;
}

}  // namespace pitchrl
