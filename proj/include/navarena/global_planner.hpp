#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "navarena/geometry.hpp"
#include "navarena/grid.hpp"

namespace navarena {

/// Polyline from the global planner with its arclength index.
struct GlobalPath {
  std::vector<Vec2> poses;
  std::vector<double> cumulative_arclength;
  double total_length = 0.0;
  // Graph cost of the underlying cell sequence (straight = res, diagonal = sqrt2 * res).
  double grid_cost = 0.0;

  bool empty() const { return poses.empty(); }
  const Vec2& goal() const { return poses.back(); }

  static GlobalPath from_poses(std::vector<Vec2> poses);
};

/// Occupancy grid dilated by a disc for planning.
class PlannerGrid {
 public:
  PlannerGrid() = default;
  PlannerGrid(OccupancyGrid base, double inflation_radius, std::vector<std::uint8_t> inflated);

  const OccupancyGrid& base() const { return base_; }
  double inflation_radius() const { return inflation_radius_; }
  bool blocked(int cx, int cy) const {
    return !base_.in_bounds(cx, cy) || inflated_[base_.index(cx, cy)] != 0;
  }
  bool blocked(CellIndex c) const { return blocked(c.x, c.y); }
  const std::vector<std::uint8_t>& inflated() const { return inflated_; }

 private:
  OccupancyGrid base_;
  double inflation_radius_ = 0.0;
  std::vector<std::uint8_t> inflated_;
};

/// Marks a cell occupied iff its center lies within `radius` of an occupied
/// base cell's center.
PlannerGrid inflate(const OccupancyGrid& grid, double radius);

class NoPathError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidEndpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Octile distance between two cells in cell units.
double octile_distance(CellIndex a, CellIndex b);

/// 8-connected A* with an octile heuristic. Diagonal moves may not cut
/// blocked corners. Ties break on (f, h, cell index). The first and last
/// poses are the exact start and goal coordinates.
GlobalPath plan_astar(const PlannerGrid& pgrid, const Vec2& start, const Vec2& goal);

/// Nearest unblocked cell to `p` by breadth-first search, if any.
std::optional<CellIndex> nearest_free_cell(const PlannerGrid& pgrid, const Vec2& p);

/// Plans from `start` even when it lies in inflated space: the search begins
/// at the nearest free cell and the path is prefixed with `start`.
GlobalPath plan_from(const PlannerGrid& pgrid, const Vec2& start, const Vec2& goal);

/// Point at arclength s along the path (linear interpolation).
Vec2 path_query(const GlobalPath& path, double s);

/// Minimum distance from p to the path polyline.
double distance_to_path(const GlobalPath& path, const Vec2& p);

}  // namespace navarena
