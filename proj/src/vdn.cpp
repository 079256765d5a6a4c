#include "pitchrl/vdn.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "pitchrl/errors.hpp"

namespace pitchrl {

namespace {

constexpr int kCheckpointVersion = 1;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }
double silu(double z) { return z * sigmoid(z); }
double silu_grad(double z) {
  const double s = sigmoid(z);
  return s * (1.0 + z * (1.0 - s));
}

void check_shapes(const std::vector<int>& shapes) {
  if (shapes.size() < 2) throw ShapeMismatch("QNetwork needs at least input and output sizes");
  for (int s : shapes) {
    if (s < 1) throw ShapeMismatch("QNetwork layer sizes must be >= 1");
  }
}

Eigen::MatrixXd stack_inputs(std::span<const Transition* const> batch, std::size_t agent, bool next,
                             int input_size) {
  Eigen::MatrixXd m(input_size, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& per_agent = next ? batch[b]->next_obs : batch[b]->obs;
    if (agent >= per_agent.size()) throw ShapeMismatch("transition has fewer agents than networks");
    const auto& o = per_agent[agent];
    if (static_cast<int>(o.size()) != input_size) {
      throw ShapeMismatch("observation length " + std::to_string(o.size()) + " != network input " +
                          std::to_string(input_size));
    }
    m.col(static_cast<Eigen::Index>(b)) = Eigen::Map<const Eigen::VectorXd>(o.data(), input_size);
  }
  return m;
}

}  // namespace

QNetwork::QNetwork(std::vector<int> layer_shapes, std::mt19937_64& rng) : shapes_(std::move(layer_shapes)) {
  check_shapes(shapes_);
  for (std::size_t l = 0; l + 1 < shapes_.size(); ++l) {
    const int in = shapes_[l];
    const int out = shapes_[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> init(-bound, bound);
    Layer layer{Eigen::MatrixXd(out, in), Eigen::VectorXd(out)};
    for (Eigen::Index c = 0; c < in; ++c) {
      for (Eigen::Index r = 0; r < out; ++r) layer.weights(r, c) = init(rng);
    }
    for (Eigen::Index r = 0; r < out; ++r) layer.bias(r) = init(rng);
    layers_.push_back(std::move(layer));
  }
}

QNetwork QNetwork::zeros(std::vector<int> layer_shapes) {
  check_shapes(layer_shapes);
  QNetwork net;
  net.shapes_ = std::move(layer_shapes);
  for (std::size_t l = 0; l + 1 < net.shapes_.size(); ++l) {
    net.layers_.push_back({Eigen::MatrixXd::Zero(net.shapes_[l + 1], net.shapes_[l]),
                           Eigen::VectorXd::Zero(net.shapes_[l + 1])});
  }
  return net;
}

std::size_t QNetwork::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
  return n;
}

Eigen::VectorXd QNetwork::forward(std::span<const double> obs) const {
  if (static_cast<int>(obs.size()) != input_size()) {
    throw ShapeMismatch("observation length " + std::to_string(obs.size()) + " != network input " +
                        std::to_string(input_size()));
  }
  Eigen::MatrixXd x = Eigen::Map<const Eigen::VectorXd>(obs.data(), input_size());
  return forward_batch(x).col(0);
}

Eigen::MatrixXd QNetwork::forward_batch(const Eigen::MatrixXd& inputs) const {
  if (inputs.rows() != input_size()) throw ShapeMismatch("batch rows != network input size");
  Eigen::MatrixXd h = inputs;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = layers_[l].weights * h;
    z.colwise() += layers_[l].bias;
    if (l + 1 < layers_.size()) z = z.unaryExpr(&silu);
    h = std::move(z);
  }
  return h;
}

std::vector<double> QNetwork::parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const auto& l : layers_) {
    flat.insert(flat.end(), l.weights.data(), l.weights.data() + l.weights.size());
    flat.insert(flat.end(), l.bias.data(), l.bias.data() + l.bias.size());
  }
  return flat;
}

void QNetwork::set_parameters(std::span<const double> flat) {
  if (flat.size() != parameter_count()) {
    throw ShapeMismatch("expected " + std::to_string(parameter_count()) + " parameters, got " +
                        std::to_string(flat.size()));
  }
  std::size_t k = 0;
  for (auto& l : layers_) {
    std::copy_n(flat.data() + k, l.weights.size(), l.weights.data());
    k += static_cast<std::size_t>(l.weights.size());
    std::copy_n(flat.data() + k, l.bias.size(), l.bias.data());
    k += static_cast<std::size_t>(l.bias.size());
  }
}

bool QNetwork::operator==(const QNetwork& o) const {
  return shapes_ == o.shapes_ && parameters() == o.parameters();
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("replay buffer capacity must be >= 1");
  items_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[cursor_] = std::move(t);
  }
  cursor_ = (cursor_ + 1) % capacity_;
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t batch_size, std::mt19937_64& rng) const {
  if (batch_size == 0 || items_.size() < batch_size) {
    throw ConfigError("replay buffer holds " + std::to_string(items_.size()) +
                      " transitions, cannot sample " + std::to_string(batch_size));
  }
  std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
  std::vector<const Transition*> out(batch_size);
  for (auto& p : out) p = &items_[pick(rng)];
  return out;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("train.learning_rate must be > 0");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("train.gamma must be in [0, 1]");
  auto prob = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!prob(epsilon_start) || !prob(epsilon_end)) throw ConfigError("train.epsilon values must be in [0, 1]");
  if (!(epsilon_decay_fraction >= 0.0)) throw ConfigError("train.epsilon_decay_fraction must be >= 0");
  if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (target_sync_period < 1) throw ConfigError("train.target_sync_period must be >= 1");
  if (buffer_capacity < batch_size) throw ConfigError("train.buffer_capacity must be >= batch_size");
  if (total_steps < 1) throw ConfigError("train.total_steps must be >= 1");
  if (train_every < 1) throw ConfigError("train.train_every must be >= 1");
  if (learning_starts < batch_size) throw ConfigError("train.learning_starts must be >= batch_size");
  if (!(grad_clip > 0.0)) throw ConfigError("train.grad_clip must be > 0");
  for (int h : hidden) {
    if (h < 1) throw ConfigError("train.hidden sizes must be >= 1");
  }
}

double TrainConfig::epsilon_at(long step) const {
  const double decay_steps = epsilon_decay_fraction * static_cast<double>(total_steps);
  if (decay_steps <= 0.0 || static_cast<double>(step) >= decay_steps) return epsilon_end;
  const double f = static_cast<double>(step) / decay_steps;
  return epsilon_start + f * (epsilon_end - epsilon_start);
}

double joint_q(std::span<const double> per_agent_q) {
  return std::accumulate(per_agent_q.begin(), per_agent_q.end(), 0.0);
}

int greedy_action(const Eigen::VectorXd& values) {
  int best = 0;
  for (Eigen::Index k = 1; k < values.size(); ++k) {
    if (values(k) > values(best)) best = static_cast<int>(k);
  }
  return best;
}

std::vector<int> select_actions(const std::vector<QNetwork>& nets,
                                const std::vector<std::vector<double>>& obs, double epsilon,
                                std::mt19937_64& rng) {
  if (obs.size() != nets.size()) throw ShapeMismatch("one observation per agent network expected");
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<int> actions(nets.size());
  for (std::size_t a = 0; a < nets.size(); ++a) {
    if (epsilon > 0.0 && coin(rng) < epsilon) {
      std::uniform_int_distribution<int> pick(0, nets[a].output_size() - 1);
      actions[a] = pick(rng);
    } else {
      actions[a] = greedy_action(nets[a].forward(obs[a]));
    }
  }
  return actions;
}

TdGradient td_gradient(const std::vector<QNetwork>& nets, const std::vector<QNetwork>& target_nets,
                       std::span<const Transition* const> batch, double gamma) {
  if (batch.empty()) throw ShapeMismatch("td_gradient: empty batch");
  if (nets.size() != target_nets.size()) throw ShapeMismatch("online and target agent counts differ");
  const std::size_t agents = nets.size();
  const auto B = static_cast<Eigen::Index>(batch.size());
  for (const auto* t : batch) {
    if (t->actions.size() != agents) throw ShapeMismatch("transition action count != agent count");
  }

  Eigen::VectorXd y(B);
  for (Eigen::Index b = 0; b < B; ++b) y(b) = batch[static_cast<std::size_t>(b)]->reward;
  Eigen::VectorXd bootstrap = Eigen::VectorXd::Zero(B);

  // Forward passes, keeping pre-activations for the backward pass.
  struct Trace {
    std::vector<Eigen::MatrixXd> pre;   // z per layer
    std::vector<Eigen::MatrixXd> post;  // input, then h per hidden layer
  };
  std::vector<Trace> traces(agents);
  Eigen::VectorXd q_total = Eigen::VectorXd::Zero(B);
  for (std::size_t a = 0; a < agents; ++a) {
    const auto& net = nets[a];
    auto& tr = traces[a];
    tr.post.push_back(stack_inputs(batch, a, false, net.input_size()));
    const auto& layers = net.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
      Eigen::MatrixXd z = layers[l].weights * tr.post.back();
      z.colwise() += layers[l].bias;
      tr.pre.push_back(z);
      if (l + 1 < layers.size()) tr.post.push_back(z.unaryExpr(&silu));
    }
    const Eigen::MatrixXd& out = tr.pre.back();
    for (Eigen::Index b = 0; b < B; ++b) {
      const int u = batch[static_cast<std::size_t>(b)]->actions[a];
      if (u < 0 || u >= net.output_size()) throw ShapeMismatch("action index outside network output");
      q_total(b) += out(u, b);
    }
    if (gamma != 0.0) {
      const Eigen::MatrixXd next = target_nets[a].forward_batch(stack_inputs(batch, a, true, net.input_size()));
      bootstrap += next.colwise().maxCoeff().transpose();
    }
  }
  for (Eigen::Index b = 0; b < B; ++b) {
    if (!batch[static_cast<std::size_t>(b)]->terminal && gamma != 0.0) y(b) += gamma * bootstrap(b);
  }

  const Eigen::VectorXd err = y - q_total;
  TdGradient result;
  result.loss = err.squaredNorm() / static_cast<double>(B);
  const Eigen::VectorXd d_q = err * (-2.0 / static_cast<double>(B));  // dL/dQ_tot

  result.grads.resize(agents);
  for (std::size_t a = 0; a < agents; ++a) {
    const auto& net = nets[a];
    const auto& layers = net.layers();
    const auto& tr = traces[a];
    Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(net.output_size(), B);
    for (Eigen::Index b = 0; b < B; ++b) delta(batch[static_cast<std::size_t>(b)]->actions[a], b) = d_q(b);

    std::vector<Eigen::MatrixXd> d_w(layers.size());
    std::vector<Eigen::VectorXd> d_b(layers.size());
    for (std::size_t l = layers.size(); l-- > 0;) {
      d_w[l] = delta * tr.post[l].transpose();
      d_b[l] = delta.rowwise().sum();
      if (l > 0) {
        Eigen::MatrixXd back = layers[l].weights.transpose() * delta;
        delta = back.cwiseProduct(tr.pre[l - 1].unaryExpr(&silu_grad));
      }
    }
    auto& flat = result.grads[a];
    flat.reserve(net.parameter_count());
    for (std::size_t l = 0; l < layers.size(); ++l) {
      flat.insert(flat.end(), d_w[l].data(), d_w[l].data() + d_w[l].size());
      flat.insert(flat.end(), d_b[l].data(), d_b[l].data() + d_b[l].size());
    }
  }
  return result;
}

double td_update(std::vector<QNetwork>& nets, const std::vector<QNetwork>& target_nets,
                 std::span<const Transition* const> batch, const TrainConfig& config) {
  TdGradient g = td_gradient(nets, target_nets, batch, config.gamma);
  double norm2 = 0.0;
  for (const auto& flat : g.grads) {
    for (double v : flat) norm2 += v * v;
  }
  const double norm = std::sqrt(norm2);
  const double scale = norm > config.grad_clip ? config.grad_clip / norm : 1.0;
  for (std::size_t a = 0; a < nets.size(); ++a) {
    std::vector<double> params = nets[a].parameters();
    for (std::size_t k = 0; k < params.size(); ++k) {
      params[k] -= config.learning_rate * scale * g.grads[a][k];
    }
    nets[a].set_parameters(params);
  }
  return g.loss;
}

void sync_target(const std::vector<QNetwork>& nets, std::vector<QNetwork>& target_nets) { target_nets = nets; }

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  nlohmann::json agents = nlohmann::json::array();
  for (const auto& net : ckpt.nets) {
    agents.push_back({{"layer_shapes", net.layer_shapes()}, {"params", net.parameters()}});
  }
  nlohmann::json j{{"version", kCheckpointVersion}, {"config", ckpt.config}, {"agents", agents}, {"step", ckpt.step}};
  std::ofstream out(path);
  if (!out) throw CheckpointFormatError("cannot write checkpoint: " + path.string());
  out << j.dump() << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointFormatError("cannot open checkpoint: " + path.string());
  Checkpoint ckpt;
  try {
    nlohmann::json j;
    in >> j;
    if (j.at("version").get<int>() != kCheckpointVersion) {
      throw CheckpointFormatError("checkpoint " + path.string() + ": unsupported version");
    }
    ckpt.config = j.at("config");
    ckpt.step = j.at("step").get<long>();
    for (const auto& agent : j.at("agents")) {
      QNetwork net = QNetwork::zeros(agent.at("layer_shapes").get<std::vector<int>>());
      net.set_parameters(agent.at("params").get<std::vector<double>>());
      ckpt.nets.push_back(std::move(net));
    }
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointFormatError("checkpoint " + path.string() + ": " + e.what());
  } catch (const ShapeMismatch& e) {
    throw CheckpointFormatError("checkpoint " + path.string() + ": " + e.what());
  }
  if (ckpt.nets.empty()) throw CheckpointFormatError("checkpoint " + path.string() + ": no agents");
  return ckpt;
}

}  // namespace pitchrl
