#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "navarena/env.hpp"
#include "navarena/network.hpp"
#include "navarena/training.hpp"

namespace navarena {

struct TrainingLogEntry {
  std::int64_t episode = 0;
  int steps = 0;
  double total_reward = 0.0;
  bool success = false;
  int obstacle_count = 0;
  double wall_time_s = 0.0;
};

/// Shared parameters with serialized Adam updates. Readers get an immutable
/// snapshot of some complete version.
class ParameterStore {
 public:
  ParameterStore(NetworkParams initial, const TrainConfig& cfg);

  std::shared_ptr<const NetworkParams> snapshot() const;
  /// Applies one Adam step; returns the new version number.
  std::uint64_t apply(const NetworkParams& gradient);
  std::uint64_t version() const;

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const NetworkParams> current_;
  Adam adam_;
  std::uint64_t version_ = 0;
};

using EnvFactory = std::function<std::unique_ptr<NavigationEnv>(int worker, std::uint64_t seed)>;

EnvFactory make_env_factory(const EnvConfig& config);

struct TrainCallbacks {
  // Called under the log lock after every finished episode.
  std::function<void(const TrainingLogEntry&, const CurriculumState&)> on_episode;
  // Called by the worker after each parameter update.
  std::function<void(std::uint64_t version, const LossReport&)> on_update;
};

struct TrainResult {
  NetworkParams params;
  std::vector<TrainingLogEntry> log;
  std::int64_t total_steps = 0;
  std::uint64_t updates = 0;
  int final_obstacles = 0;
  double final_success_average = 0.0;
  bool converged = false;  // stopped on the success bound rather than the budget
  bool time_limited = false;  // stopped on max_wall_seconds
  bool aborted = false;    // a worker failed; `log` holds what finished before
  std::string error;
};

/// Asynchronous advantage actor-critic. N workers each own an environment and
/// roll out `rollout_length` steps against their parameter snapshot, then
/// submit clipped gradients to the shared store. With one worker the loop
/// runs on the calling thread and is deterministic for a given seed.
TrainResult a3c_train(const TrainConfig& cfg, const EnvFactory& make_env,
                      std::optional<NetworkParams> initial = std::nullopt,
                      const TrainCallbacks& callbacks = {});

/// Initial parameters for a training seed.
NetworkParams initial_params(const TrainConfig& cfg);

void write_training_log(const std::vector<TrainingLogEntry>& log, const std::filesystem::path& path);

}  // namespace navarena
