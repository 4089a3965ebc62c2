#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "navarena/geometry.hpp"
#include "navarena/grid.hpp"
#include "navarena/random.hpp"

namespace navarena {

/// Velocity command (twist).
struct Action {
  double v = 0.0;      // m/s
  double omega = 0.0;  // rad/s
  bool operator==(const Action&) const = default;
};

struct RobotState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // (-pi, pi]
  double v = 0.0;
  double omega = 0.0;
  double radius = 0.3;

  Vec2 position() const { return {x, y}; }
};

enum class MotionModel { kLinearBounce, kWaypointLoop, kRandomWalk };

std::string_view to_string(MotionModel model);
MotionModel parse_motion_model(std::string_view name);

struct ObstacleState {
  Vec2 position;
  Vec2 velocity;
  double radius = 0.3;
  MotionModel model = MotionModel::kLinearBounce;
  // Waypoint-loop parameters.
  std::vector<Vec2> waypoints;
  std::size_t next_waypoint = 0;
  // Random-walk heading diffusion, rad/sqrt(s).
  double heading_noise = 1.0;
  // Nominal speed v_obs; |velocity| stays equal to it.
  double cruise_speed = 0.0;

  double speed() const { return velocity.norm(); }
};

struct LidarScan {
  double angle_min = 0.0;
  double angle_increment = 0.0;
  double range_max = 0.0;
  std::vector<double> ranges;

  std::size_t n_beams() const { return ranges.size(); }
  double min_range() const;
};

struct WorldConfig {
  double dt = 0.1;
  int n_beams_raw = 360;
  double range_max = 3.5;
  double v_max = 0.5;
  double omega_max = 1.5;
  double d_goal = 0.3;
  double robot_radius = 0.3;
  double lidar_noise_std = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Smallest range reported for a beam whose origin is already inside geometry.
inline constexpr double kMinLidarRange = 1e-6;

/// Casts `n_beams` rays over 360 degrees from `pose`, beam i at heading
/// theta + i * 2pi / n_beams. Grid traversal is an exact DDA over cell
/// boundaries; obstacle discs are intersected analytically.
LidarScan raycast(const OccupancyGrid& grid, std::span<const ObstacleState> obstacles,
                  const RobotState& pose, int n_beams, double range_max);

/// Range along a single ray, capped at range_max.
double cast_ray(const OccupancyGrid& grid, std::span<const ObstacleState> obstacles,
                const Vec2& origin, double angle, double range_max);

/// Strict overlap test of the robot disc against occupied cells and obstacle
/// discs (center distance < d_r + r_obs).
bool check_collision(const RobotState& robot, const OccupancyGrid& grid,
                     std::span<const ObstacleState> obstacles);

struct KeepOut {
  Vec2 center;
  double radius = 0.0;
};

struct SpawnOptions {
  double radius = 0.3;
  // If set, linear-bounce headings are this angle or its opposite.
  std::optional<double> heading_axis;
  // Optional spawn rectangle [min, max] in meters.
  std::optional<std::pair<Vec2, Vec2>> region;
  std::vector<KeepOut> keep_out;
  double heading_noise = 1.0;
  int waypoints_per_loop = 3;
};

class SpawnError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Places n obstacles in free space without overlapping the grid, each other
/// or any keep-out disc. Each starts at speed v_obs. Throws SpawnError after
/// 1000 failed placement attempts.
std::vector<ObstacleState> spawn_obstacles(const OccupancyGrid& grid, int n, double v_obs,
                                           MotionModel model, std::uint64_t seed,
                                           const SpawnOptions& options = {});

/// Advances one obstacle by dt. Linear-bounce and random-walk obstacles
/// reflect off axis-aligned cell boundaries; speed is preserved.
void advance_obstacle(ObstacleState& obstacle, const OccupancyGrid& grid, double dt, Rng& rng);

/// Fixed-timestep world: one robot, dynamic obstacles, a static grid.
/// Single-threaded; independent instances may live on different threads.
class World {
 public:
  World(OccupancyGrid grid, const WorldConfig& config, const RobotState& robot,
        std::vector<ObstacleState> obstacles);

  /// Clamps the action to kinematic limits, integrates the unicycle model,
  /// advances obstacles and refreshes the collision flag.
  void step(const Action& action);

  LidarScan scan();

  const OccupancyGrid& grid() const { return grid_; }
  const WorldConfig& config() const { return config_; }
  const RobotState& robot() const { return robot_; }
  const std::vector<ObstacleState>& obstacles() const { return obstacles_; }
  double time() const { return static_cast<double>(steps_) * config_.dt; }
  std::uint64_t steps() const { return steps_; }
  bool in_collision() const { return collision_; }

  /// Moves the robot without simulating (test staging, episode resets).
  void teleport(double x, double y, double theta);
  void set_robot_velocity(double v, double omega);

 private:
  OccupancyGrid grid_;
  WorldConfig config_;
  RobotState robot_;
  std::vector<ObstacleState> obstacles_;
  Rng rng_;
  std::uint64_t steps_ = 0;
  bool collision_ = false;
};

Action clamp_action(const Action& a, double v_max, double omega_max);

}  // namespace navarena
