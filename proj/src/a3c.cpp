#include "navarena/a3c.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <thread>

#include <fmt/format.h>

#include "navarena/local_planner.hpp"

namespace navarena {

ParameterStore::ParameterStore(NetworkParams initial, const TrainConfig& cfg)
    : current_(std::make_shared<const NetworkParams>(std::move(initial))),
      adam_(current_->size(), cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon) {}

std::shared_ptr<const NetworkParams> ParameterStore::snapshot() const {
  std::lock_guard lock(mutex_);
  return current_;
}

std::uint64_t ParameterStore::apply(const NetworkParams& gradient) {
  std::lock_guard lock(mutex_);
  auto next = std::make_shared<NetworkParams>(*current_);
  adam_.step(next->data(), gradient.data());
  current_ = std::move(next);
  return ++version_;
}

std::uint64_t ParameterStore::version() const {
  std::lock_guard lock(mutex_);
  return version_;
}

EnvFactory make_env_factory(const EnvConfig& config) {
  config.validate();
  return [config](int, std::uint64_t seed) { return std::make_unique<NavigationEnv>(config, seed); };
}

NetworkParams initial_params(const TrainConfig& cfg) {
  return NetworkParams::random(cfg.network, derive_seed(cfg.seed, SeedStream::kNetworkInit));
}

namespace {

using Clock = std::chrono::steady_clock;

struct SharedState {
  explicit SharedState(const TrainConfig& cfg) : curriculum(cfg.curriculum) {}

  std::atomic<std::int64_t> steps_taken{0};
  std::atomic<bool> stop{false};
  std::mutex log_mutex;
  std::vector<TrainingLogEntry> log;
  CurriculumState curriculum;
  bool converged = false;
  std::atomic<bool> time_limited{false};
  std::string error;
  Clock::time_point started = Clock::now();
};

class Worker {
 public:
  Worker(int id, const TrainConfig& cfg, const EnvFactory& make_env, ParameterStore& store,
         SharedState& shared, const TrainCallbacks& callbacks)
      : cfg_(cfg),
        store_(store),
        shared_(shared),
        callbacks_(callbacks),
        rng_(derive_seed(derive_seed(derive_seed(cfg.seed, SeedStream::kWorker),
                                     static_cast<std::uint64_t>(id)),
                         SeedStream::kPolicy)) {
    const std::uint64_t env_seed =
        derive_seed(derive_seed(cfg.seed, SeedStream::kWorker), static_cast<std::uint64_t>(id));
    env_ = make_env(id, env_seed);
    if (!env_) throw std::runtime_error("environment factory returned null");
  }

  void run() {
    start_episode();
    while (!shared_.stop.load()) {
      const auto params = store_.snapshot();
      Trajectory traj;
      traj.steps.reserve(static_cast<std::size_t>(cfg_.rollout_length));
      bool budget_hit = false;
      bool episode_over = false;

      for (int t = 0; t < cfg_.rollout_length; ++t) {
        if (shared_.steps_taken.fetch_add(1) >= cfg_.total_steps) {
          budget_hit = true;
          break;
        }
        TrajectoryStep rec;
        rec.input = obs_.to_input();
        rec.hidden_in = hidden_;
        ForwardResult fr = forward(*params, rec.input, hidden_);
        const Eigen::VectorXd probs = softmax(fr.logits);
        rec.action = static_cast<int>(sample_categorical(probs, rng_));
        rec.value = fr.value;

        const EnvStep step = env_->step(static_cast<std::size_t>(rec.action));
        rec.reward = step.reward.total;
        rec.terminal = step.terminal;
        episode_reward_ += step.reward.total;
        hidden_ = std::move(fr.hidden);
        obs_ = step.observation;
        traj.steps.push_back(std::move(rec));

        if (step.terminal || step.truncated) {
          if (step.truncated) {
            traj.bootstrap_value = forward(*params, obs_.to_input(), hidden_).value;
          }
          finish_episode(step.success);
          episode_over = true;
          break;
        }
      }
      if (traj.steps.empty()) break;
      if (!episode_over) traj.bootstrap_value = forward(*params, obs_.to_input(), hidden_).value;

      GradientResult g = compute_gradients(*params, traj, cfg_);
      const std::uint64_t version = store_.apply(g.gradient);
      if (callbacks_.on_update) callbacks_.on_update(version, g.report);
      if (budget_hit) break;
      if (cfg_.max_wall_seconds > 0.0 &&
          std::chrono::duration<double>(Clock::now() - shared_.started).count() >= cfg_.max_wall_seconds) {
        shared_.time_limited.store(true);
        shared_.stop.store(true);
      }
      if (episode_over && !shared_.stop.load()) start_episode();
    }
  }

 private:
  void start_episode() {
    int level = 0;
    {
      std::lock_guard lock(shared_.log_mutex);
      level = shared_.curriculum.obstacles();
    }
    obs_ = env_->reset(level);
    hidden_ = zero_hidden(cfg_.network);
    episode_reward_ = 0.0;
  }

  void finish_episode(bool success) {
    std::lock_guard lock(shared_.log_mutex);
    TrainingLogEntry e;
    e.episode = static_cast<std::int64_t>(shared_.log.size());
    e.steps = env_->episode_steps();
    e.total_reward = episode_reward_;
    e.success = success;
    e.obstacle_count = env_->obstacle_count();
    e.wall_time_s = std::chrono::duration<double>(Clock::now() - shared_.started).count();
    shared_.log.push_back(e);
    shared_.curriculum.update(success);
    if (callbacks_.on_episode) callbacks_.on_episode(e, shared_.curriculum);
    if (shared_.curriculum.at_max() &&
        static_cast<int>(shared_.curriculum.recorded()) >= cfg_.curriculum.window &&
        shared_.curriculum.success_average() >= cfg_.mean_success_bound) {
      shared_.converged = true;
      shared_.stop.store(true);
    }
  }

  const TrainConfig& cfg_;
  ParameterStore& store_;
  SharedState& shared_;
  const TrainCallbacks& callbacks_;
  std::unique_ptr<NavigationEnv> env_;
  Rng rng_;
  Observation obs_;
  HiddenState hidden_;
  double episode_reward_ = 0.0;
};

}  // namespace

TrainResult a3c_train(const TrainConfig& cfg, const EnvFactory& make_env,
                      std::optional<NetworkParams> initial, const TrainCallbacks& callbacks) {
  cfg.validate();
  NetworkParams init = initial ? std::move(*initial) : initial_params(cfg);
  if (!(init.shape() == cfg.network)) throw ShapeMismatchError("initial parameters do not match config");
  ParameterStore store(std::move(init), cfg);
  SharedState shared(cfg);

  auto run_worker = [&](int id) {
    try {
      Worker w(id, cfg, make_env, store, shared, callbacks);
      w.run();
    } catch (const std::exception& e) {
      std::lock_guard lock(shared.log_mutex);
      if (shared.error.empty()) shared.error = fmt::format("worker {}: {}", id, e.what());
      shared.stop.store(true);
    }
  };

  if (cfg.n_workers == 1) {
    run_worker(0);
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(static_cast<std::size_t>(cfg.n_workers));
    for (int i = 0; i < cfg.n_workers; ++i) threads.emplace_back(run_worker, i);
  }

  TrainResult out;
  out.params = *store.snapshot();
  out.log = std::move(shared.log);
  out.total_steps = std::min<std::int64_t>(shared.steps_taken.load(), cfg.total_steps);
  out.updates = store.version();
  out.final_obstacles = shared.curriculum.obstacles();
  out.final_success_average = shared.curriculum.success_average();
  out.converged = shared.converged;
  out.time_limited = shared.time_limited.load();
  out.aborted = !shared.error.empty();
  out.error = shared.error;
  return out;
}

void write_training_log(const std::vector<TrainingLogEntry>& log, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write training log " + path.string());
  f << "episode,steps,total_reward,success,obstacle_count,wall_time_s\n";
  for (const auto& e : log) {
    f << fmt::format("{},{},{},{},{},{:.3f}\n", e.episode, e.steps, e.total_reward,
                     e.success ? 1 : 0, e.obstacle_count, e.wall_time_s);
  }
  if (!f) throw std::runtime_error("failed writing training log " + path.string());
}

}  // namespace navarena
