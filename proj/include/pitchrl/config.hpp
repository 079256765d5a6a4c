#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pitchrl/pitch_control.hpp"
#include "pitchrl/reward.hpp"
#include "pitchrl/sim_core.hpp"
#include "pitchrl/vdn.hpp"

namespace pitchrl {

inline constexpr const char* kDefaultChainSource = "default_chain";

struct ExperimentConfig {
  ScenarioConfig scenario{};
  RewardConfig reward{};
  TrainConfig train{};
  PassModelParams pass_model{};
  std::string epv_source = kDefaultChainSource;  // or a path to an EPV grid file
  std::vector<std::uint64_t> seeds{1, 2, 3};
  long eval_every = 2000;  // environment steps
  int eval_episodes = 32;
  std::vector<double> eval_difficulties{0.95, 0.6, 0.05};
  int field_stride = 1;        // recompute control field / EPV every k steps
  long checkpoint_every = 0;   // 0: only the final checkpoint

  void validate() const;
};

// JSON <-> config. Unknown keys and ill-typed values raise ConfigError with
// the dotted path of the offending field; absent keys keep their defaults.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

ScenarioConfig scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScenarioConfig& scenario);

// Stable hex digest of the configuration, excluding the seed list.
std::string config_hash(const ExperimentConfig& config);

// Snapshot serialization used by trajectory dumps and `render-field --state`.
nlohmann::json state_to_json(const GameState& state);
GameState state_from_json(const nlohmann::json& j);
nlohmann::json events_to_json(const StepEvents& events);

std::string outcome_name(Outcome outcome);

}  // namespace pitchrl
