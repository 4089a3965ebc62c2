#include "navarena/observation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace navarena {

std::vector<double> Observation::to_input() const {
  std::vector<double> in;
  in.reserve(lidar.size() + 2);
  in.insert(in.end(), lidar.begin(), lidar.end());
  in.push_back(goal_distance);
  in.push_back(goal_angle);
  return in;
}

Observation build_observation(const LidarScan& scan, const RobotState& robot, const Vec2& subgoal) {
  const std::size_t n = scan.ranges.size();
  if (n < static_cast<std::size_t>(kLidarBins)) {
    throw std::invalid_argument("scan has " + std::to_string(n) + " beams; need at least 344");
  }
  if (!(scan.range_max > 0.0)) throw std::invalid_argument("scan range_max must be positive");
  Observation obs;
  obs.lidar.assign(kLidarBins, scan.range_max);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t bin = i * kLidarBins / n;
    obs.lidar[bin] = std::min(obs.lidar[bin], scan.ranges[i]);
  }
  for (double& v : obs.lidar) v = std::clamp(v / scan.range_max, 0.0, 1.0);
  const Vec2 d = subgoal - robot.position();
  obs.goal_distance = d.norm();
  obs.goal_angle = wrap_angle(std::atan2(d.y, d.x) - robot.theta);
  return obs;
}

}  // namespace navarena
