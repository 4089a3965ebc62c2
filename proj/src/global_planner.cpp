#include "navarena/global_planner.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <queue>
#include <tuple>

namespace navarena {

GlobalPath GlobalPath::from_poses(std::vector<Vec2> poses) {
  GlobalPath path;
  path.poses = std::move(poses);
  path.cumulative_arclength.reserve(path.poses.size());
  double s = 0.0;
  for (std::size_t i = 0; i < path.poses.size(); ++i) {
    if (i > 0) s += distance(path.poses[i - 1], path.poses[i]);
    path.cumulative_arclength.push_back(s);
  }
  path.total_length = s;
  return path;
}

PlannerGrid::PlannerGrid(OccupancyGrid base, double inflation_radius,
                         std::vector<std::uint8_t> inflated)
    : base_(std::move(base)), inflation_radius_(inflation_radius), inflated_(std::move(inflated)) {
  if (inflated_.size() != base_.cell_count()) throw std::invalid_argument("inflation size mismatch");
}

PlannerGrid inflate(const OccupancyGrid& grid, double radius) {
  if (radius < 0.0) throw std::invalid_argument("inflation radius must be non-negative");
  const double r_cells = radius / grid.resolution();
  const double r2 = r_cells * r_cells + 1e-9;
  const int reach = static_cast<int>(std::floor(r_cells + 1e-9));
  std::vector<CellIndex> kernel;
  for (int dy = -reach; dy <= reach; ++dy) {
    for (int dx = -reach; dx <= reach; ++dx) {
      if (dx * dx + dy * dy <= r2) kernel.push_back({dx, dy});
    }
  }
  std::vector<std::uint8_t> out(grid.cells().begin(), grid.cells().end());
  for (int cy = 0; cy < grid.height(); ++cy) {
    for (int cx = 0; cx < grid.width(); ++cx) {
      if (!grid.occupied(cx, cy)) continue;
      for (const auto& k : kernel) {
        const int nx = cx + k.x;
        const int ny = cy + k.y;
        if (grid.in_bounds(nx, ny)) out[grid.index(nx, ny)] = 1;
      }
    }
  }
  return PlannerGrid(grid, radius, std::move(out));
}

double octile_distance(CellIndex a, CellIndex b) {
  const int dx = std::abs(a.x - b.x);
  const int dy = std::abs(a.y - b.y);
  return std::numbers::sqrt2 * std::min(dx, dy) + std::abs(dx - dy);
}

namespace {

struct Node {
  double f;
  double h;
  std::size_t index;
  bool operator>(const Node& o) const {
    return std::tie(f, h, index) > std::tie(o.f, o.h, o.index);
  }
};

std::vector<CellIndex> astar_cells(const PlannerGrid& pgrid, CellIndex start, CellIndex goal,
                                   double& cost_cells) {
  const OccupancyGrid& g = pgrid.base();
  const std::size_t n = g.cell_count();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> cost(n, kInf);
  std::vector<std::int64_t> parent(n, -1);
  std::vector<std::uint8_t> closed(n, 0);
  std::priority_queue<Node, std::vector<Node>, std::greater<>> open;

  const std::size_t s = g.index(start.x, start.y);
  const std::size_t t = g.index(goal.x, goal.y);
  cost[s] = 0.0;
  const double h0 = octile_distance(start, goal);
  open.push({h0, h0, s});
  constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};

  while (!open.empty()) {
    const Node node = open.top();
    open.pop();
    if (closed[node.index]) continue;
    closed[node.index] = 1;
    if (node.index == t) break;
    const int cx = static_cast<int>(node.index % static_cast<std::size_t>(g.width()));
    const int cy = static_cast<int>(node.index / static_cast<std::size_t>(g.width()));
    for (int k = 0; k < 8; ++k) {
      const int nx = cx + kDx[k];
      const int ny = cy + kDy[k];
      if (pgrid.blocked(nx, ny)) continue;
      const bool diagonal = k >= 4;
      if (diagonal && (pgrid.blocked(cx + kDx[k], cy) || pgrid.blocked(cx, cy + kDy[k]))) continue;
      const std::size_t ni = g.index(nx, ny);
      if (closed[ni]) continue;
      const double next = cost[node.index] + (diagonal ? std::numbers::sqrt2 : 1.0);
      if (next < cost[ni]) {
        cost[ni] = next;
        parent[ni] = static_cast<std::int64_t>(node.index);
        const double h = octile_distance({nx, ny}, goal);
        open.push({next + h, h, ni});
      }
    }
  }
  if (!closed[t]) throw NoPathError("goal unreachable from start");
  cost_cells = cost[t];
  std::vector<CellIndex> cells;
  for (std::int64_t i = static_cast<std::int64_t>(t); i >= 0; i = parent[static_cast<std::size_t>(i)]) {
    const auto ui = static_cast<std::size_t>(i);
    cells.push_back({static_cast<int>(ui % static_cast<std::size_t>(g.width())),
                     static_cast<int>(ui / static_cast<std::size_t>(g.width()))});
  }
  std::reverse(cells.begin(), cells.end());
  return cells;
}

GlobalPath assemble(const OccupancyGrid& g, const std::vector<CellIndex>& cells, double cost_cells,
                    const Vec2& start, const Vec2& goal) {
  std::vector<Vec2> poses;
  if (cells.size() == 1) {
    poses.push_back(goal);
  } else {
    poses.reserve(cells.size());
    for (const auto& c : cells) poses.push_back(g.cell_center(c));
    poses.front() = start;
    poses.back() = goal;
  }
  GlobalPath path = GlobalPath::from_poses(std::move(poses));
  path.grid_cost = cost_cells * g.resolution();
  return path;
}

}  // namespace

GlobalPath plan_astar(const PlannerGrid& pgrid, const Vec2& start, const Vec2& goal) {
  const OccupancyGrid& g = pgrid.base();
  const CellIndex s = g.world_to_cell(start);
  const CellIndex t = g.world_to_cell(goal);
  if (pgrid.blocked(s)) throw InvalidEndpointError("start lies in occupied space");
  if (pgrid.blocked(t)) throw InvalidEndpointError("goal lies in occupied space");
  double cost_cells = 0.0;
  const auto cells = astar_cells(pgrid, s, t, cost_cells);
  return assemble(g, cells, cost_cells, start, goal);
}

std::optional<CellIndex> nearest_free_cell(const PlannerGrid& pgrid, const Vec2& p) {
  const OccupancyGrid& g = pgrid.base();
  CellIndex c = g.world_to_cell(p);
  c.x = std::clamp(c.x, 0, g.width() - 1);
  c.y = std::clamp(c.y, 0, g.height() - 1);
  if (!pgrid.blocked(c)) return c;
  std::vector<std::uint8_t> seen(g.cell_count(), 0);
  std::deque<CellIndex> queue{c};
  seen[g.index(c.x, c.y)] = 1;
  std::optional<CellIndex> best;
  double best_d = std::numeric_limits<double>::infinity();
  // BFS rings; among free cells at the first ring that has any, keep the
  // one whose center is closest to p.
  while (!queue.empty()) {
    const std::size_t ring = queue.size();
    for (std::size_t i = 0; i < ring; ++i) {
      const CellIndex cur = queue.front();
      queue.pop_front();
      if (!pgrid.blocked(cur)) {
        const double d = distance(g.cell_center(cur), p);
        if (d < best_d) {
          best_d = d;
          best = cur;
        }
        continue;
      }
      constexpr int kDx[4] = {1, -1, 0, 0};
      constexpr int kDy[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        const CellIndex nb{cur.x + kDx[k], cur.y + kDy[k]};
        if (!g.in_bounds(nb.x, nb.y) || seen[g.index(nb.x, nb.y)]) continue;
        seen[g.index(nb.x, nb.y)] = 1;
        queue.push_back(nb);
      }
    }
    if (best) return best;
  }
  return std::nullopt;
}

GlobalPath plan_from(const PlannerGrid& pgrid, const Vec2& start, const Vec2& goal) {
  const OccupancyGrid& g = pgrid.base();
  if (!pgrid.blocked(g.world_to_cell(start))) return plan_astar(pgrid, start, goal);
  const auto free = nearest_free_cell(pgrid, start);
  if (!free) throw NoPathError("no free cell near start");
  GlobalPath tail = plan_astar(pgrid, g.cell_center(*free), goal);
  std::vector<Vec2> poses;
  poses.reserve(tail.poses.size() + 1);
  poses.push_back(start);
  poses.insert(poses.end(), tail.poses.begin(), tail.poses.end());
  const double cost = tail.grid_cost;
  GlobalPath path = GlobalPath::from_poses(std::move(poses));
  path.grid_cost = cost;
  return path;
}

Vec2 path_query(const GlobalPath& path, double s) {
  if (path.empty()) throw std::invalid_argument("empty path");
  constexpr double kSlack = 1e-9;
  if (s < -kSlack || s > path.total_length + kSlack) throw std::out_of_range("arclength outside path");
  s = std::clamp(s, 0.0, path.total_length);
  const auto& cum = path.cumulative_arclength;
  auto it = std::upper_bound(cum.begin(), cum.end(), s);
  if (it == cum.end()) return path.poses.back();
  const std::size_t i = static_cast<std::size_t>(it - cum.begin());
  if (i == 0) return path.poses.front();
  const double seg = cum[i] - cum[i - 1];
  const double t = seg > 0.0 ? (s - cum[i - 1]) / seg : 0.0;
  return path.poses[i - 1] + (path.poses[i] - path.poses[i - 1]) * t;
}

double distance_to_path(const GlobalPath& path, const Vec2& p) {
  if (path.empty()) throw std::invalid_argument("empty path");
  if (path.poses.size() == 1) return distance(path.poses.front(), p);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < path.poses.size(); ++i) {
    best = std::min(best, point_segment_distance(p, path.poses[i], path.poses[i + 1]));
  }
  return best;
}

}  // namespace navarena
