#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "navarena/global_planner.hpp"
#include "navarena/grid.hpp"
#include "navarena/local_planner.hpp"
#include "navarena/observation.hpp"
#include "navarena/reward.hpp"
#include "navarena/world.hpp"

namespace navarena {

/// Randomized training environment: a fresh map, start, goal and obstacle
/// set every episode.
struct EnvConfig {
  WorldConfig world;
  MapGenParams map;  // size and resolution; wall/static counts are drawn per episode
  int max_walls = 3;
  int max_static = 6;
  double start_clearance = 0.45;  // inflation used to pick start and goal cells, m
  double goal_min_distance = 1.0;
  double goal_max_distance = 3.0;
  double max_detour = 1.5;  // A* cost over straight-line distance
  double v_obs_min = 0.1;
  double v_obs_max = 0.3;
  std::vector<MotionModel> motion_models{MotionModel::kRandomWalk, MotionModel::kLinearBounce};
  double obstacle_radius = 0.3;
  double start_keep_out = 1.0;
  double goal_keep_out = 0.6;
  int max_episode_steps = 128;
  // Empty map with the goal a fixed distance straight ahead of a fixed start.
  bool trivial = false;
  double trivial_goal_distance = 2.0;
  RewardParams reward;

  void validate() const;
};

struct EnvStep {
  Observation observation;
  RewardBreakdown reward;
  bool terminal = false;   // goal reached or collision
  bool truncated = false;  // episode step cap reached
  bool success = false;
  bool collision = false;
};

class NavigationEnv {
 public:
  NavigationEnv(const EnvConfig& config, std::uint64_t seed,
                DiscreteActionSet actions = DiscreteActionSet::standard());

  /// Starts a new episode with `n_obstacles` dynamic obstacles (fewer if they
  /// do not fit).
  Observation reset(int n_obstacles);
  EnvStep step(std::size_t action_index);

  const World& world() const { return *world_; }
  const Vec2& goal() const { return goal_; }
  int episode_steps() const { return episode_steps_; }
  int obstacle_count() const;
  std::uint64_t episodes() const { return episodes_; }
  const DiscreteActionSet& actions() const { return actions_; }
  const EnvConfig& config() const { return config_; }

 private:
  StepSnapshot snapshot(const LidarScan& scan, const Vec2& prev_position) const;

  EnvConfig config_;
  std::uint64_t seed_;
  DiscreteActionSet actions_;
  std::optional<World> world_;
  Vec2 goal_;
  StepSnapshot prev_;
  int episode_steps_ = 0;
  std::uint64_t episodes_ = 0;
};

}  // namespace navarena
