#pragma once

#include <memory>
#include <string>
#include <vector>

#include "navarena/network.hpp"
#include "navarena/observation.hpp"
#include "navarena/random.hpp"
#include "navarena/world.hpp"

namespace navarena {

class DiscreteActionSet {
 public:
  /// Requires at least two actions, one of which is the stop action (0, 0).
  explicit DiscreteActionSet(std::vector<Action> actions);

  /// Forward, soft and hard turns at 0.3 m/s, stop, and reverse.
  static DiscreteActionSet standard();

  std::size_t size() const { return actions_.size(); }
  const Action& operator[](std::size_t i) const { return actions_.at(i); }
  const std::vector<Action>& actions() const { return actions_; }

 private:
  std::vector<Action> actions_;
};

struct DwaParams {
  int n_v = 10;       // velocity grid has n_v + 1 samples across the window
  int n_omega = 20;   // angular grid has n_omega + 1 samples
  double t_sim = 1.5;
  double sim_dt = 0.1;
  double heading_weight = 0.8;
  double clearance_weight = 0.2;
  double velocity_weight = 0.2;
  double clearance_cap = 2.0;
  double acc_v = 2.5;      // m/s^2
  double acc_omega = 3.2;  // rad/s^2
  double control_dt = 0.1; // window is what is reachable within one control period
  double v_min = 0.0;
  double v_max = 0.5;
  double omega_max = 1.5;
  double robot_radius = 0.3;

  void validate() const;
};

struct DwaSample {
  Action action;
  double clearance = 0.0;  // min over simulated poses, robot center to scan point
  bool admissible = false;
  double score = 0.0;
  RobotState final_pose;
};

struct DwaDecision {
  Action action;
  bool fallback = false;  // every sampled trajectory was blocked
  std::size_t sample_index = 0;
  double score = 0.0;
};

/// Velocity grid over the dynamic window, in evaluation order.
std::vector<Action> dwa_velocity_samples(const RobotState& robot, const DwaParams& params);

/// Scores every sampled trajectory (exposed for inspection and tests).
std::vector<DwaSample> dwa_evaluate(const LidarScan& scan, const RobotState& robot,
                                    const Vec2& subgoal, const DwaParams& params);

/// Dynamic Window Approach: best admissible sample by
/// w_h (pi - |heading err|)/pi + w_c min(c, cap)/cap + w_v v / v_max.
/// If every sample is blocked, rotates in place toward the subgoal at omega_max.
DwaDecision dwa_plan(const LidarScan& scan, const RobotState& robot, const Vec2& subgoal,
                     const DwaParams& params);

enum class PolicyMode { kGreedy, kSample };

struct PolicyDecision {
  std::size_t action_index = 0;
  Action action;
  HiddenState hidden;
  double value = 0.0;
  Eigen::VectorXd probabilities;
};

/// Index of the largest probability; ties go to the lowest index.
std::size_t argmax_first(const Eigen::VectorXd& values);
/// Inverse-CDF draw from a probability vector.
std::size_t sample_categorical(const Eigen::VectorXd& probabilities, Rng& rng);

/// One actor-critic step: forward pass, then greedy or sampled action choice.
PolicyDecision policy_plan(const Observation& obs, const NetworkParams& params,
                           const HiddenState& hidden, PolicyMode mode, Rng& rng,
                           const DiscreteActionSet& actions = DiscreteActionSet::standard());

/// Common interface of the per-episode local planners.
class LocalPlanner {
 public:
  virtual ~LocalPlanner() = default;
  virtual std::string name() const = 0;
  virtual void reset() = 0;
  virtual Action plan(const LidarScan& scan, const RobotState& robot, const Vec2& subgoal) = 0;
};

class DwaPlanner final : public LocalPlanner {
 public:
  explicit DwaPlanner(const DwaParams& params) : params_(params) { params_.validate(); }
  std::string name() const override { return "dwa"; }
  void reset() override {}
  Action plan(const LidarScan& scan, const RobotState& robot, const Vec2& subgoal) override;

 private:
  DwaParams params_;
};

/// Learned policy planner. Parameters are shared read-only between episodes.
class PolicyPlanner final : public LocalPlanner {
 public:
  PolicyPlanner(std::shared_ptr<const NetworkParams> params, PolicyMode mode, std::uint64_t seed,
                DiscreteActionSet actions = DiscreteActionSet::standard());
  std::string name() const override { return "arena"; }
  void reset() override;
  Action plan(const LidarScan& scan, const RobotState& robot, const Vec2& subgoal) override;

 private:
  std::shared_ptr<const NetworkParams> params_;
  PolicyMode mode_;
  std::uint64_t seed_;
  DiscreteActionSet actions_;
  HiddenState hidden_;
  Rng rng_;
};

}  // namespace navarena
