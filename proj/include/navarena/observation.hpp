#pragma once

#include <vector>

#include "navarena/geometry.hpp"
#include "navarena/world.hpp"

namespace navarena {

inline constexpr int kLidarBins = 344;
inline constexpr int kObservationSize = kLidarBins + 2;

struct Observation {
  std::vector<double> lidar;  // kLidarBins values in [0, 1]
  double goal_distance = 0.0;  // rho, m
  double goal_angle = 0.0;     // phi, (-pi, pi], robot frame

  /// Network input: lidar bins followed by rho and phi.
  std::vector<double> to_input() const;
};

/// Min-pools the raw scan into 344 angular bins (raw beam i falls in bin
/// floor(i * 344 / n)), normalizes by range_max and appends the subgoal in
/// polar robot-frame coordinates. Throws std::invalid_argument for scans
/// with fewer than 344 beams.
Observation build_observation(const LidarScan& scan, const RobotState& robot, const Vec2& subgoal);

}  // namespace navarena
