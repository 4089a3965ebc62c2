#pragma once

namespace navarena {

/// What the reward needs to know about one step.
struct StepSnapshot {
  double goal_distance = 0.0;  // d_ag, m
  double min_clearance = 0.0;  // smallest lidar range, m
  double displacement = 0.0;   // |delta r| over the step, m
  bool collision = false;
  bool goal_reached = false;
};

struct RewardParams {
  double success = 15.0;
  double collision = -10.0;
  double danger = -0.15;
  double no_move = -0.01;
  double w_p = 0.25;   // weight for progress toward the goal
  double w_n = 0.4;    // weight for moving away
  double d_safe = 0.5;  // m
};

struct RewardBreakdown {
  double r_s = 0.0;  // success
  double r_c = 0.0;  // collision
  double r_d = 0.0;  // danger
  double r_p = 0.0;  // progress
  double r_m = 0.0;  // no-move
  double total = 0.0;
};

RewardBreakdown compute_reward(const StepSnapshot& prev, const StepSnapshot& curr,
                               const RewardParams& params);

}  // namespace navarena
