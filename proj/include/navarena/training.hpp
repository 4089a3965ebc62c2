#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "navarena/network.hpp"
#include "navarena/reward.hpp"

namespace navarena {

struct CurriculumParams {
  int initial_obstacles = 0;
  int max_obstacles = 16;
  int step = 2;
  int window = 100;
  double up_threshold = 0.8;
  double down_threshold = 0.4;
};

struct TrainConfig {
  double gamma = 0.99;
  double learning_rate = 0.00025;
  double adam_epsilon = 1e-5;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  int n_workers = 4;
  int rollout_length = 32;
  int batch_size = 64;  // recorded; A3C updates per rollout
  int max_episode_steps = 128;
  bool use_gae = false;
  double gae_lambda = 0.95;
  bool clip_value_loss = false;
  double value_clip_range = 0.2;
  double max_gradient_norm = 0.5;
  double entropy_beta = 0.01;
  double value_coef = 0.5;
  double mean_success_bound = 1.0;
  // Epsilon-greedy schedule entries; A3C samples from the softmax instead.
  double epsilon_end = 0.05;
  std::int64_t epsilon_max_steps = 100000;
  std::int64_t total_steps = 1000000;
  double max_wall_seconds = 0.0;  // 0: no wall-clock limit
  std::uint64_t seed = 1;
  RewardParams reward;
  CurriculumParams curriculum;
  NetworkShape network;

  void validate() const;
};

/// One environment step as seen by the learner.
struct TrajectoryStep {
  std::vector<double> input;  // network input at this step
  HiddenState hidden_in;
  int action = 0;
  double reward = 0.0;
  double value = 0.0;  // critic estimate when acting
  bool terminal = false;
};

/// Contiguous steps from one worker's episode. If the last step is not
/// terminal the return is bootstrapped from `bootstrap_value`.
struct Trajectory {
  std::vector<TrajectoryStep> steps;
  double bootstrap_value = 0.0;

  bool terminal() const { return !steps.empty() && steps.back().terminal; }
};

/// Backward recursion R_t = r_t + gamma R_{t+1}, seeded with 0 when terminal
/// and with `bootstrap` otherwise.
std::vector<double> discounted_returns(std::span<const double> rewards, double bootstrap,
                                       double gamma, bool terminal);

/// Generalized advantage estimates.
std::vector<double> gae_advantages(std::span<const double> rewards, std::span<const double> values,
                                   double bootstrap, double gamma, double lambda, bool terminal);

struct LossReport {
  double policy_loss = 0.0;
  double value_loss = 0.0;  // mean (R - V)^2
  double entropy = 0.0;     // mean policy entropy
  double total_loss = 0.0;
  double grad_norm = 0.0;  // before clipping
  bool clipped = false;
};

struct GradientResult {
  NetworkParams gradient;
  LossReport report;
};

class NonFiniteLossError : public std::runtime_error {
 public:
  NonFiniteLossError(const std::string& what, LossReport report)
      : std::runtime_error(what), report_(report) {}
  const LossReport& report() const { return report_; }

 private:
  LossReport report_;
};

/// Advantage actor-critic gradient over one trajectory:
///   policy_loss  = mean(-log pi(a_t|s_t) A_t), A_t = R_t - V_t held constant
///   value_loss   = mean((R_t - V_t)^2)
///   total        = policy_loss + value_coef value_loss - entropy_beta entropy
/// Exact backpropagation through the unrolled GRU, then global-norm clipping
/// to max_gradient_norm (disabled when that is <= 0).
GradientResult compute_gradients(const NetworkParams& params, const Trajectory& trajectory,
                                 const TrainConfig& cfg);

class Adam {
 public:
  Adam() = default;
  Adam(std::size_t n, double learning_rate, double beta1, double beta2, double epsilon);

  void step(std::span<double> params, std::span<const double> grad);
  std::int64_t steps() const { return t_; }

 private:
  double lr_ = 0.0;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  std::int64_t t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

/// Obstacle-count schedule driven by a moving success average. Levels only
/// change once the window is full; the window is cleared after each change.
class CurriculumState {
 public:
  CurriculumState() = default;
  explicit CurriculumState(const CurriculumParams& params);

  /// Records one episode outcome; returns true if the level changed.
  bool update(bool success);

  int obstacles() const { return obstacles_; }
  double success_average() const;
  std::size_t recorded() const { return recent_.size(); }
  bool at_max() const { return obstacles_ >= params_.max_obstacles; }
  const CurriculumParams& params() const { return params_; }

 private:
  CurriculumParams params_;
  int obstacles_ = 0;
  std::deque<bool> recent_;
};

}  // namespace navarena
