#include "navarena/world.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace navarena {

std::string_view to_string(MotionModel model) {
  switch (model) {
    case MotionModel::kLinearBounce:
      return "linear-bounce";
    case MotionModel::kWaypointLoop:
      return "waypoint-loop";
    case MotionModel::kRandomWalk:
      return "random-walk";
  }
  return "unknown";
}

MotionModel parse_motion_model(std::string_view name) {
  if (name == "linear-bounce") return MotionModel::kLinearBounce;
  if (name == "waypoint-loop") return MotionModel::kWaypointLoop;
  if (name == "random-walk") return MotionModel::kRandomWalk;
  throw std::invalid_argument("unknown motion model: " + std::string(name));
}

void WorldConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (n_beams_raw < 344) throw std::invalid_argument("n_beams_raw must be at least 344");
  if (!(range_max > 0.0)) throw std::invalid_argument("range_max must be positive");
  if (!(v_max > 0.0) || !(omega_max > 0.0)) throw std::invalid_argument("limits must be positive");
  if (!(robot_radius > 0.0)) throw std::invalid_argument("robot radius must be positive");
  if (!(d_goal > 0.0)) throw std::invalid_argument("goal radius must be positive");
  if (lidar_noise_std < 0.0) throw std::invalid_argument("lidar noise must be non-negative");
}

Action clamp_action(const Action& a, double v_max, double omega_max) {
  return {std::clamp(a.v, -v_max, v_max), std::clamp(a.omega, -omega_max, omega_max)};
}

bool check_collision(const RobotState& robot, const OccupancyGrid& grid,
                     std::span<const ObstacleState> obstacles) {
  const Vec2 p = robot.position();
  for (const auto& ob : obstacles) {
    if (distance(p, ob.position) < robot.radius + ob.radius) return true;
  }
  return grid.disc_overlaps(p, robot.radius);
}

std::vector<ObstacleState> spawn_obstacles(const OccupancyGrid& grid, int n, double v_obs,
                                           MotionModel model, std::uint64_t seed,
                                           const SpawnOptions& options) {
  if (n < 0) throw std::invalid_argument("obstacle count must be non-negative");
  if (v_obs < 0.0) throw std::invalid_argument("obstacle speed must be non-negative");
  const double r = options.radius;
  if (!(r > 0.0)) throw std::invalid_argument("obstacle radius must be positive");
  Vec2 lo{r, r};
  Vec2 hi{grid.width_m() - r, grid.height_m() - r};
  if (options.region) {
    lo = {std::max(lo.x, options.region->first.x), std::max(lo.y, options.region->first.y)};
    hi = {std::min(hi.x, options.region->second.x), std::min(hi.y, options.region->second.y)};
  }
  Rng rng(seed);
  std::vector<ObstacleState> out;
  out.reserve(static_cast<std::size_t>(n));

  auto free_spot = [&](const Vec2& p) {
    if (grid.disc_overlaps(p, r)) return false;
    for (const auto& k : options.keep_out) {
      if (distance(p, k.center) < k.radius + r) return false;
    }
    return true;
  };
  auto sample = [&](bool avoid_others) -> std::optional<Vec2> {
    if (!(hi.x > lo.x) || !(hi.y > lo.y)) return std::nullopt;
    constexpr int kAttempts = 1000;
    for (int attempt = 0; attempt < kAttempts; ++attempt) {
      const Vec2 p{uniform(rng, lo.x, hi.x), uniform(rng, lo.y, hi.y)};
      if (!free_spot(p)) continue;
      if (avoid_others) {
        const bool clash = std::any_of(out.begin(), out.end(), [&](const ObstacleState& o) {
          return distance(o.position, p) < o.radius + r;
        });
        if (clash) continue;
      }
      return p;
    }
    return std::nullopt;
  };

  for (int i = 0; i < n; ++i) {
    const auto p = sample(true);
    if (!p) {
      throw SpawnError("could not place obstacle " + std::to_string(i + 1) + " of " +
                       std::to_string(n) + " after 1000 attempts");
    }
    ObstacleState ob;
    ob.position = *p;
    ob.radius = r;
    ob.model = model;
    ob.cruise_speed = v_obs;
    ob.heading_noise = options.heading_noise;
    double heading = uniform(rng, -std::numbers::pi, std::numbers::pi);
    if (options.heading_axis && model == MotionModel::kLinearBounce) {
      heading = *options.heading_axis + (uniform_int(rng, 0, 1) == 0 ? 0.0 : std::numbers::pi);
    }
    if (model == MotionModel::kWaypointLoop) {
      ob.waypoints.push_back(*p);
      for (int k = 1; k < std::max(2, options.waypoints_per_loop); ++k) {
        const auto w = sample(false);
        if (!w) throw SpawnError("could not place obstacle waypoints");
        ob.waypoints.push_back(*w);
      }
      ob.next_waypoint = 1;
      const Vec2 to = ob.waypoints[1] - *p;
      if (to.norm() > 0.0) heading = std::atan2(to.y, to.x);
    }
    ob.velocity = {v_obs * std::cos(heading), v_obs * std::sin(heading)};
    out.push_back(std::move(ob));
  }
  return out;
}

namespace {

void bounce_step(ObstacleState& ob, const OccupancyGrid& grid, double dt) {
  const Vec2 p = ob.position;
  Vec2 next = p + ob.velocity * dt;
  if (grid.disc_overlaps(next, ob.radius)) {
    bool flip_x = grid.disc_overlaps({p.x + ob.velocity.x * dt, p.y}, ob.radius);
    bool flip_y = grid.disc_overlaps({p.x, p.y + ob.velocity.y * dt}, ob.radius);
    if (!flip_x && !flip_y) flip_x = flip_y = true;  // corner hit
    if (flip_x) ob.velocity.x = -ob.velocity.x;
    if (flip_y) ob.velocity.y = -ob.velocity.y;
    next = p + ob.velocity * dt;
    if (grid.disc_overlaps(next, ob.radius)) next = p;
  }
  ob.position = next;
}

}  // namespace

void advance_obstacle(ObstacleState& ob, const OccupancyGrid& grid, double dt, Rng& rng) {
  switch (ob.model) {
    case MotionModel::kLinearBounce:
      bounce_step(ob, grid, dt);
      break;
    case MotionModel::kRandomWalk: {
      const double heading = std::atan2(ob.velocity.y, ob.velocity.x) +
                             std::normal_distribution<double>(0.0, ob.heading_noise)(rng) *
                                 std::sqrt(dt);
      ob.velocity = {ob.cruise_speed * std::cos(heading), ob.cruise_speed * std::sin(heading)};
      bounce_step(ob, grid, dt);
      break;
    }
    case MotionModel::kWaypointLoop: {
      if (ob.waypoints.size() < 2) break;
      double budget = ob.cruise_speed * dt;
      const Vec2 target = ob.waypoints[ob.next_waypoint];
      const Vec2 to = target - ob.position;
      const double dist = to.norm();
      if (dist <= budget) {
        ob.position = target;
        ob.next_waypoint = (ob.next_waypoint + 1) % ob.waypoints.size();
        const Vec2 ahead = ob.waypoints[ob.next_waypoint] - ob.position;
        const double len = ahead.norm();
        if (len > 0.0) ob.velocity = ahead * (ob.cruise_speed / len);
      } else {
        ob.velocity = to * (ob.cruise_speed / dist);
        ob.position = ob.position + ob.velocity * dt;
      }
      break;
    }
  }
}

World::World(OccupancyGrid grid, const WorldConfig& config, const RobotState& robot,
             std::vector<ObstacleState> obstacles)
    : grid_(std::move(grid)),
      config_(config),
      robot_(robot),
      obstacles_(std::move(obstacles)),
      rng_(derive_seed(config.seed, SeedStream::kWorld)) {
  config_.validate();
  robot_.radius = config_.robot_radius;
  robot_.theta = wrap_angle(robot_.theta);
  collision_ = check_collision(robot_, grid_, obstacles_);
}

void World::step(const Action& action) {
  const Action a = clamp_action(action, config_.v_max, config_.omega_max);
  const double dt = config_.dt;
  robot_.v = a.v;
  robot_.omega = a.omega;
  robot_.x += a.v * std::cos(robot_.theta) * dt;
  robot_.y += a.v * std::sin(robot_.theta) * dt;
  robot_.theta = wrap_angle(robot_.theta + a.omega * dt);
  for (auto& ob : obstacles_) advance_obstacle(ob, grid_, dt, rng_);
  collision_ = check_collision(robot_, grid_, obstacles_);
  ++steps_;
}

LidarScan World::scan() {
  LidarScan s = raycast(grid_, obstacles_, robot_, config_.n_beams_raw, config_.range_max);
  if (config_.lidar_noise_std > 0.0) {
    // Separate stream so noise never perturbs obstacle motion.
    Rng noise(derive_seed(config_.seed ^ steps_, SeedStream::kWorld));
    std::normal_distribution<double> n(0.0, config_.lidar_noise_std);
    for (double& r : s.ranges) r = std::clamp(r + n(noise), kMinLidarRange, s.range_max);
  }
  return s;
}

void World::teleport(double x, double y, double theta) {
  robot_.x = x;
  robot_.y = y;
  robot_.theta = wrap_angle(theta);
  collision_ = check_collision(robot_, grid_, obstacles_);
}

void World::set_robot_velocity(double v, double omega) {
  const Action a = clamp_action({v, omega}, config_.v_max, config_.omega_max);
  robot_.v = a.v;
  robot_.omega = a.omega;
}

}  // namespace navarena
