#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "pitchrl/sim_core.hpp"

namespace pitchrl {

// Feed-forward action-value network: SiLU hidden layers, linear output.
class QNetwork {
 public:
  QNetwork() = default;
  // Uniform fan-in initialization U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  QNetwork(std::vector<int> layer_shapes, std::mt19937_64& rng);
  static QNetwork zeros(std::vector<int> layer_shapes);

  const std::vector<int>& layer_shapes() const { return shapes_; }
  int input_size() const { return shapes_.front(); }
  int output_size() const { return shapes_.back(); }
  std::size_t parameter_count() const;

  Eigen::VectorXd forward(std::span<const double> obs) const;
  // Columns are samples.
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs) const;

  // Flat layout: per layer, weights column-major then biases.
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> flat);

  struct Layer {
    Eigen::MatrixXd weights;  // out x in
    Eigen::VectorXd bias;
  };
  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

  bool operator==(const QNetwork& o) const;

 private:
  std::vector<int> shapes_;
  std::vector<Layer> layers_;
};

struct Transition {
  std::vector<std::vector<double>> obs;       // per agent
  std::vector<int> actions;                   // per agent
  double reward = 0.0;                        // shaped team reward
  std::vector<std::vector<double>> next_obs;  // per agent
  bool terminal = false;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);
  void push(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  // Uniform sampling with replacement; requires size() >= batch_size.
  std::vector<const Transition*> sample(std::size_t batch_size, std::mt19937_64& rng) const;

 private:
  std::size_t capacity_;
  std::size_t cursor_ = 0;
  std::vector<Transition> items_;
};

struct TrainConfig {
  double learning_rate = 0.01;
  double gamma = 0.99;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 0.2;  // of total_steps
  int batch_size = 32;
  int target_sync_period = 1000;
  int buffer_capacity = 50'000;
  std::vector<int> hidden{64, 64};
  long total_steps = 200'000;
  int train_every = 1;
  int learning_starts = 1000;
  double grad_clip = 10.0;
  ObservationMode observation_mode = ObservationMode::Global;

  void validate() const;
  double epsilon_at(long step) const;
};

double joint_q(std::span<const double> per_agent_q);

// Epsilon-greedy per agent; ties broken toward the lowest index.
std::vector<int> select_actions(const std::vector<QNetwork>& nets,
                                const std::vector<std::vector<double>>& obs, double epsilon,
                                std::mt19937_64& rng);
int greedy_action(const Eigen::VectorXd& values);

struct TdGradient {
  double loss = 0.0;
  std::vector<std::vector<double>> grads;  // per agent, flat like QNetwork::parameters
};

// Loss mean((y - sum_a Q_a(o_a, u_a))^2) with y = r, or
// y = r + gamma * sum_a max_u Q'_a(o'_a, u) for non-terminal samples, and its
// gradient with respect to the online parameters.
TdGradient td_gradient(const std::vector<QNetwork>& nets, const std::vector<QNetwork>& target_nets,
                       std::span<const Transition* const> batch, double gamma);

// One clipped SGD step on every agent network. Returns the pre-update loss.
double td_update(std::vector<QNetwork>& nets, const std::vector<QNetwork>& target_nets,
                 std::span<const Transition* const> batch, const TrainConfig& config);

void sync_target(const std::vector<QNetwork>& nets, std::vector<QNetwork>& target_nets);

// Versioned JSON {version, config, agents: [{layer_shapes, params}], step}.
struct Checkpoint {
  nlohmann::json config;
  std::vector<QNetwork> nets;
  long step = 0;
};
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace pitchrl
