#pragma once

#include "navarena/geometry.hpp"
#include "navarena/global_planner.hpp"
#include "navarena/world.hpp"

namespace navarena {

struct HorizonParams {
  double d_ahead = 1.55;  // spatial horizon, m
  double t_lim = 4.0;     // stuck-time limit, s
  double d_off = 1.0;     // off-course distance that forces a replan, m
  double move_eps = 0.01; // |v| at or below this counts as not moving, m/s

  void validate() const;
};

/// Result of intersecting the horizon circle with the global path.
struct SubgoalResult {
  enum class Kind { kIntersection, kGoalInside, kNeedsReplan };
  Kind kind = Kind::kNeedsReplan;
  Vec2 point;
  double arclength = 0.0;

  bool needs_replan() const { return kind == Kind::kNeedsReplan; }
};

/// Circle R(p_r, d_ahead) against the path polyline. Returns the goal when it
/// lies strictly inside the circle, otherwise the intersection with the
/// largest arclength, otherwise kNeedsReplan.
SubgoalResult compute_subgoal(const GlobalPath& path, const Vec2& robot, double d_ahead);

struct SubgoalState {
  Vec2 subgoal;
  GlobalPath path;
  double last_progress_time = 0.0;
  int replan_count = 0;
};

/// Off-course or stuck test. A robot moving faster than move_eps is never
/// considered stuck.
bool should_replan(const SubgoalState& state, const RobotState& robot, const GlobalPath& path,
                   const HorizonParams& params, double now);

/// Owns the global path and subgoal for one episode and performs at most one
/// global replan per update.
class IntermediatePlanner {
 public:
  IntermediatePlanner(const PlannerGrid& pgrid, const Vec2& goal, const HorizonParams& params);

  /// Plans the initial path from `start`; throws NoPathError if the goal is unreachable.
  void reset(const Vec2& start, double now);

  Vec2 update(const RobotState& robot, double now);

  const SubgoalState& state() const { return state_; }
  const HorizonParams& params() const { return params_; }
  const Vec2& goal() const { return goal_; }

 private:
  void replan(const Vec2& from, double now);

  const PlannerGrid* pgrid_;
  Vec2 goal_;
  HorizonParams params_;
  SubgoalState state_;
};

}  // namespace navarena
