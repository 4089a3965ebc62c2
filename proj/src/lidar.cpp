#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "navarena/world.hpp"

namespace navarena {

double LidarScan::min_range() const {
  if (ranges.empty()) return range_max;
  return *std::min_element(ranges.begin(), ranges.end());
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Distance to the first occupied cell along the ray, or +inf if none within
// range_max. Amanatides & Woo traversal.
double grid_hit(const OccupancyGrid& grid, const Vec2& o, double dx, double dy,
                double range_max) {
  const double res = grid.resolution();
  CellIndex cell = grid.world_to_cell(o);
  if (grid.occupied(cell)) return 0.0;

  const int step_x = dx > 0.0 ? 1 : -1;
  const int step_y = dy > 0.0 ? 1 : -1;
  double t_max_x = kInf;
  double t_max_y = kInf;
  double t_delta_x = kInf;
  double t_delta_y = kInf;
  if (dx != 0.0) {
    const double edge = (dx > 0.0 ? cell.x + 1 : cell.x) * res;
    t_max_x = (edge - o.x) / dx;
    t_delta_x = res / std::abs(dx);
  }
  if (dy != 0.0) {
    const double edge = (dy > 0.0 ? cell.y + 1 : cell.y) * res;
    t_max_y = (edge - o.y) / dy;
    t_delta_y = res / std::abs(dy);
  }
  for (;;) {
    double t;
    if (t_max_x < t_max_y) {
      t = t_max_x;
      cell.x += step_x;
      t_max_x += t_delta_x;
    } else {
      t = t_max_y;
      cell.y += step_y;
      t_max_y += t_delta_y;
    }
    if (t >= range_max) return kInf;
    if (grid.occupied(cell)) return t;
  }
}

struct Disc {
  Vec2 center;
  double radius;
};

double disc_hit(const Disc& d, const Vec2& o, double dx, double dy) {
  const double ocx = o.x - d.center.x;
  const double ocy = o.y - d.center.y;
  const double b = ocx * dx + ocy * dy;
  const double c = ocx * ocx + ocy * ocy - d.radius * d.radius;
  if (c <= 0.0) return 0.0;
  if (b >= 0.0) return kInf;  // moving away from the disc
  const double disc = b * b - c;
  if (disc < 0.0) return kInf;
  return -b - std::sqrt(disc);
}

double cast(const OccupancyGrid& grid, std::span<const Disc> discs, const Vec2& o, double angle,
            double range_max) {
  const double dx = std::cos(angle);
  const double dy = std::sin(angle);
  double t = std::min(range_max, grid_hit(grid, o, dx, dy, range_max));
  for (const auto& d : discs) t = std::min(t, disc_hit(d, o, dx, dy));
  return std::max(t, kMinLidarRange);
}

}  // namespace

double cast_ray(const OccupancyGrid& grid, std::span<const ObstacleState> obstacles,
                const Vec2& origin, double angle, double range_max) {
  std::vector<Disc> discs;
  discs.reserve(obstacles.size());
  for (const auto& ob : obstacles) discs.push_back({ob.position, ob.radius});
  return cast(grid, discs, origin, angle, range_max);
}

LidarScan raycast(const OccupancyGrid& grid, std::span<const ObstacleState> obstacles,
                  const RobotState& pose, int n_beams, double range_max) {
  if (n_beams <= 0) throw std::invalid_argument("n_beams must be positive");
  LidarScan scan;
  scan.angle_min = 0.0;
  scan.angle_increment = 2.0 * std::numbers::pi / n_beams;
  scan.range_max = range_max;
  scan.ranges.resize(static_cast<std::size_t>(n_beams));

  // Only discs that can be reached within range matter.
  std::vector<Disc> near;
  const Vec2 o = pose.position();
  for (const auto& ob : obstacles) {
    if (distance(ob.position, o) < range_max + ob.radius) near.push_back({ob.position, ob.radius});
  }
  for (int i = 0; i < n_beams; ++i) {
    const double angle = pose.theta + scan.angle_min + i * scan.angle_increment;
    scan.ranges[static_cast<std::size_t>(i)] = cast(grid, near, o, angle, range_max);
  }
  return scan;
}

}  // namespace navarena
