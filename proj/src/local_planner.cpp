#include "navarena/local_planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace navarena {

DiscreteActionSet::DiscreteActionSet(std::vector<Action> actions) : actions_(std::move(actions)) {
  if (actions_.size() < 2) throw std::invalid_argument("action set needs at least two actions");
  if (std::find(actions_.begin(), actions_.end(), Action{0.0, 0.0}) == actions_.end()) {
    throw std::invalid_argument("action set must contain the stop action");
  }
}

DiscreteActionSet DiscreteActionSet::standard() {
  return DiscreteActionSet({{0.3, 0.0},
                            {0.3, 0.75},
                            {0.3, -0.75},
                            {0.3, 1.5},
                            {0.3, -1.5},
                            {0.0, 0.0},
                            {-0.15, 0.0}});
}

void DwaParams::validate() const {
  if (n_v < 1 || n_omega < 1) throw std::invalid_argument("DWA sample counts must be positive");
  if (!(t_sim > 0.0) || !(sim_dt > 0.0) || !(control_dt > 0.0)) {
    throw std::invalid_argument("DWA horizons must be positive");
  }
  if (heading_weight < 0.0 || clearance_weight < 0.0 || velocity_weight < 0.0) {
    throw std::invalid_argument("DWA weights must be non-negative");
  }
  if (!(clearance_cap > 0.0) || !(v_max > 0.0) || !(omega_max > 0.0) || v_min > v_max) {
    throw std::invalid_argument("invalid DWA limits");
  }
}

std::vector<Action> dwa_velocity_samples(const RobotState& robot, const DwaParams& p) {
  const double v_lo = std::max(p.v_min, robot.v - p.acc_v * p.control_dt);
  const double v_hi = std::max(v_lo, std::min(p.v_max, robot.v + p.acc_v * p.control_dt));
  const double w_lo = std::max(-p.omega_max, robot.omega - p.acc_omega * p.control_dt);
  const double w_hi = std::max(w_lo, std::min(p.omega_max, robot.omega + p.acc_omega * p.control_dt));
  std::vector<Action> out;
  out.reserve(static_cast<std::size_t>((p.n_v + 1) * (p.n_omega + 1)));
  for (int i = 0; i <= p.n_v; ++i) {
    const double v = ((p.n_v - i) * v_lo + i * v_hi) / p.n_v;
    for (int j = 0; j <= p.n_omega; ++j) {
      const double w = ((p.n_omega - j) * w_lo + j * w_hi) / p.n_omega;
      out.push_back({v, w});
    }
  }
  return out;
}

std::vector<DwaSample> dwa_evaluate(const LidarScan& scan, const RobotState& robot,
                                    const Vec2& subgoal, const DwaParams& p) {
  p.validate();
  const auto actions = dwa_velocity_samples(robot, p);
  const int sim_steps = std::max(1, static_cast<int>(std::lround(p.t_sim / p.sim_dt)));

  // Points farther than the trajectory reach plus the cap cannot change a score.
  double max_v = 0.0;
  for (const auto& a : actions) max_v = std::max(max_v, std::abs(a.v));
  const double relevant = max_v * p.t_sim + p.clearance_cap;
  std::vector<Vec2> points;
  for (std::size_t i = 0; i < scan.ranges.size(); ++i) {
    const double r = scan.ranges[i];
    if (r >= scan.range_max || r > relevant) continue;
    const double a = robot.theta + scan.angle_min + static_cast<double>(i) * scan.angle_increment;
    points.push_back({robot.x + r * std::cos(a), robot.y + r * std::sin(a)});
  }

  std::vector<DwaSample> out;
  out.reserve(actions.size());
  for (const auto& a : actions) {
    DwaSample s;
    s.action = a;
    RobotState pose = robot;
    double clearance = std::numeric_limits<double>::infinity();
    for (int k = 0; k < sim_steps; ++k) {
      pose.x += a.v * std::cos(pose.theta) * p.sim_dt;
      pose.y += a.v * std::sin(pose.theta) * p.sim_dt;
      pose.theta = wrap_angle(pose.theta + a.omega * p.sim_dt);
      for (const auto& q : points) {
        const double dx = q.x - pose.x;
        const double dy = q.y - pose.y;
        clearance = std::min(clearance, std::sqrt(dx * dx + dy * dy));
      }
    }
    s.final_pose = pose;
    s.clearance = clearance;
    s.admissible = clearance >= p.robot_radius;
    const Vec2 to_goal = subgoal - pose.position();
    const double heading_err = std::abs(wrap_angle(std::atan2(to_goal.y, to_goal.x) - pose.theta));
    s.score = p.heading_weight * (std::numbers::pi - heading_err) / std::numbers::pi +
              p.clearance_weight * std::min(clearance, p.clearance_cap) / p.clearance_cap +
              p.velocity_weight * a.v / p.v_max;
    out.push_back(s);
  }
  return out;
}

DwaDecision dwa_plan(const LidarScan& scan, const RobotState& robot, const Vec2& subgoal,
                     const DwaParams& p) {
  const auto samples = dwa_evaluate(scan, robot, subgoal, p);
  DwaDecision best;
  bool found = false;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!samples[i].admissible) continue;
    if (!found || samples[i].score > best.score) {
      found = true;
      best.action = samples[i].action;
      best.score = samples[i].score;
      best.sample_index = i;
    }
  }
  if (!found) {
    const Vec2 to_goal = subgoal - robot.position();
    const double err = wrap_angle(std::atan2(to_goal.y, to_goal.x) - robot.theta);
    best.fallback = true;
    best.action = {0.0, err >= 0.0 ? p.omega_max : -p.omega_max};
  }
  return best;
}

Action DwaPlanner::plan(const LidarScan& scan, const RobotState& robot, const Vec2& subgoal) {
  return dwa_plan(scan, robot, subgoal, params_).action;
}

std::size_t argmax_first(const Eigen::VectorXd& values) {
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values(i) > values(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(i);
  }
  return best;
}

std::size_t sample_categorical(const Eigen::VectorXd& probabilities, Rng& rng) {
  const double u = uniform(rng, 0.0, 1.0);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < probabilities.size(); ++i) {
    acc += probabilities(i);
    if (u < acc) return static_cast<std::size_t>(i);
  }
  // Rounding left u above the final partial sum: take the last likely action.
  for (Eigen::Index i = probabilities.size() - 1; i > 0; --i) {
    if (probabilities(i) > 0.0) return static_cast<std::size_t>(i);
  }
  return 0;
}

PolicyDecision policy_plan(const Observation& obs, const NetworkParams& params,
                           const HiddenState& hidden, PolicyMode mode, Rng& rng,
                           const DiscreteActionSet& actions) {
  if (static_cast<std::size_t>(params.shape().actions) != actions.size()) {
    throw ShapeMismatchError("network action count does not match the action set");
  }
  const auto input = obs.to_input();
  ForwardResult fr = forward(params, input, hidden);
  PolicyDecision d;
  d.probabilities = softmax(fr.logits);
  d.action_index = mode == PolicyMode::kGreedy ? argmax_first(d.probabilities)
                                               : sample_categorical(d.probabilities, rng);
  d.action = actions[d.action_index];
  d.hidden = std::move(fr.hidden);
  d.value = fr.value;
  return d;
}

PolicyPlanner::PolicyPlanner(std::shared_ptr<const NetworkParams> params, PolicyMode mode,
                             std::uint64_t seed, DiscreteActionSet actions)
    : params_(std::move(params)),
      mode_(mode),
      seed_(seed),
      actions_(std::move(actions)),
      hidden_(zero_hidden(params_->shape())),
      rng_(seed) {}

void PolicyPlanner::reset() {
  hidden_ = zero_hidden(params_->shape());
  rng_.seed(seed_);
}

Action PolicyPlanner::plan(const LidarScan& scan, const RobotState& robot, const Vec2& subgoal) {
  const Observation obs = build_observation(scan, robot, subgoal);
  PolicyDecision d = policy_plan(obs, *params_, hidden_, mode_, rng_, actions_);
  hidden_ = std::move(d.hidden);
  return d.action;
}

}  // namespace navarena
