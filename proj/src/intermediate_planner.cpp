#include "navarena/intermediate_planner.hpp"

#include <cmath>
#include <limits>

namespace navarena {

void HorizonParams::validate() const {
  if (!(d_ahead > 0.0) || !(t_lim > 0.0) || !(d_off > 0.0) || !(move_eps > 0.0)) {
    throw std::invalid_argument("horizon parameters must be strictly positive");
  }
}

SubgoalResult compute_subgoal(const GlobalPath& path, const Vec2& p, double d_ahead) {
  if (path.empty()) throw std::invalid_argument("empty path");
  SubgoalResult out;
  if (distance(path.goal(), p) < d_ahead) {
    out.kind = SubgoalResult::Kind::kGoalInside;
    out.point = path.goal();
    out.arclength = path.total_length;
    return out;
  }
  const double r2 = d_ahead * d_ahead;
  double best_s = -1.0;
  for (std::size_t i = 0; i + 1 < path.poses.size(); ++i) {
    const Vec2 a = path.poses[i];
    const Vec2 d = path.poses[i + 1] - a;
    const double len2 = d.dot(d);
    if (len2 <= 0.0) continue;
    // |a + t d - p|^2 = r^2  ->  len2 t^2 + 2 (a-p).d t + |a-p|^2 - r^2 = 0
    const Vec2 f = a - p;
    const double b = f.dot(d);
    const double c = f.dot(f) - r2;
    const double disc = b * b - len2 * c;
    if (disc < 0.0) continue;
    const double sq = std::sqrt(disc);
    const double seg_len = path.cumulative_arclength[i + 1] - path.cumulative_arclength[i];
    for (double t : {(-b + sq) / len2, (-b - sq) / len2}) {
      if (t < 0.0 || t > 1.0) continue;
      const double s = path.cumulative_arclength[i] + t * seg_len;
      if (s > best_s) {
        best_s = s;
        out.point = a + d * t;
      }
    }
  }
  if (best_s >= 0.0) {
    out.kind = SubgoalResult::Kind::kIntersection;
    out.arclength = best_s;
  }
  return out;
}

bool should_replan(const SubgoalState& state, const RobotState& robot, const GlobalPath& path,
                   const HorizonParams& params, double now) {
  if (distance_to_path(path, robot.position()) > params.d_off) return true;
  if (std::abs(robot.v) > params.move_eps) return false;
  return now - state.last_progress_time > params.t_lim;
}

IntermediatePlanner::IntermediatePlanner(const PlannerGrid& pgrid, const Vec2& goal,
                                         const HorizonParams& params)
    : pgrid_(&pgrid), goal_(goal), params_(params) {
  params_.validate();
}

void IntermediatePlanner::reset(const Vec2& start, double now) {
  state_ = SubgoalState{};
  state_.path = plan_from(*pgrid_, start, goal_);
  state_.last_progress_time = now;
  state_.subgoal = start;
}

void IntermediatePlanner::replan(const Vec2& from, double now) {
  state_.path = plan_from(*pgrid_, from, goal_);
  ++state_.replan_count;
  state_.last_progress_time = now;
}

Vec2 IntermediatePlanner::update(const RobotState& robot, double now) {
  if (std::abs(robot.v) > params_.move_eps) state_.last_progress_time = now;
  const Vec2 p = robot.position();
  SubgoalResult r;
  const bool trigger = should_replan(state_, robot, state_.path, params_, now);
  if (!trigger) r = compute_subgoal(state_.path, p, params_.d_ahead);
  if (trigger || r.needs_replan()) {
    replan(p, now);
    r = compute_subgoal(state_.path, p, params_.d_ahead);
    if (r.needs_replan()) {
      // Fresh path still misses the circle: fall back to its closest pose.
      double best = std::numeric_limits<double>::infinity();
      for (const auto& pose : state_.path.poses) {
        const double d = distance(pose, p);
        if (d < best) {
          best = d;
          r.point = pose;
        }
      }
    }
  }
  state_.subgoal = r.point;
  return state_.subgoal;
}

}  // namespace navarena
