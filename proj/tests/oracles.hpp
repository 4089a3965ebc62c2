// Brute-force reference implementations shared by the unit and acceptance tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <queue>
#include <vector>

#include "navarena/global_planner.hpp"
#include "navarena/intermediate_planner.hpp"
#include "navarena/world.hpp"

namespace navarena::testutil {

// 1 mm ray marching. Each step tests the whole 1 mm segment against the
// cells around it and the discs, so corner clips shorter than a step are not
// skipped. Returns the start of the first segment that touches geometry.
inline double march(const OccupancyGrid& g, const std::vector<ObstacleState>& obs, Vec2 o, double a,
                    double range_max) {
  const double step = 1e-3;
  const double res = g.resolution();
  const Vec2 dir{std::cos(a), std::sin(a)};
  auto segment_hits_box = [&](double s0, double s1, double x0, double y0) {
    double lo = s0, hi = s1;
    for (int axis = 0; axis < 2; ++axis) {
      const double oc = axis == 0 ? o.x : o.y;
      const double dc = axis == 0 ? dir.x : dir.y;
      const double bmin = axis == 0 ? x0 : y0;
      const double bmax = bmin + res;
      if (dc == 0.0) {
        if (oc < bmin || oc >= bmax) return false;
        continue;
      }
      double t0 = (bmin - oc) / dc, t1 = (bmax - oc) / dc;
      if (t0 > t1) std::swap(t0, t1);
      lo = std::max(lo, t0);
      hi = std::min(hi, t1);
    }
    return lo <= hi;
  };
  for (double s = 0.0; s <= range_max; s += step) {
    const double e = std::min(s + step, range_max);
    const Vec2 p{o.x + s * dir.x, o.y + s * dir.y};
    const Vec2 q{o.x + e * dir.x, o.y + e * dir.y};
    const CellIndex cp = g.world_to_cell(p), cq = g.world_to_cell(q);
    for (int y = std::min(cp.y, cq.y); y <= std::max(cp.y, cq.y); ++y) {
      for (int x = std::min(cp.x, cq.x); x <= std::max(cp.x, cq.x); ++x) {
        if (!g.occupied(CellIndex{x, y})) continue;
        if ((x == cp.x && y == cp.y) || segment_hits_box(s, e, x * res, y * res)) return s;
      }
    }
    for (const auto& ob : obs) {
      // Closest point of the segment to the disc centre.
      const double t = std::clamp((ob.position.x - o.x) * dir.x + (ob.position.y - o.y) * dir.y, s, e);
      if (distance({o.x + t * dir.x, o.y + t * dir.y}, ob.position) <= ob.radius) return s;
    }
  }
  return range_max;
}

// Path cost as (straight moves, diagonal moves); a + b*sqrt(2) is exact
// comparison material because sqrt(2) is irrational.
struct MoveCount {
  int straight = 0;
  int diagonal = 0;
  double value() const { return straight + diagonal * std::sqrt(2.0); }
  bool operator==(const MoveCount&) const = default;
};

// Plain Dijkstra over the same 8-connected graph (no corner cutting).
inline std::optional<MoveCount> dijkstra(const PlannerGrid& pg, CellIndex s, CellIndex t) {
  const OccupancyGrid& g = pg.base();
  std::vector<MoveCount> best(g.cell_count());
  std::vector<char> done(g.cell_count(), 0), seen(g.cell_count(), 0);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  seen[g.index(s.x, s.y)] = 1;
  pq.push({0.0, g.index(s.x, s.y)});
  while (!pq.empty()) {
    const auto [d, i] = pq.top();
    pq.pop();
    if (done[i]) continue;
    done[i] = 1;
    const int x = static_cast<int>(i % g.width()), y = static_cast<int>(i / g.width());
    if (x == t.x && y == t.y) return best[i];
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const int nx = x + dx, ny = y + dy;
        if (pg.blocked(nx, ny)) continue;
        if (dx != 0 && dy != 0 && (pg.blocked(x + dx, y) || pg.blocked(x, y + dy))) continue;
        MoveCount c = best[i];
        (dx != 0 && dy != 0) ? ++c.diagonal : ++c.straight;
        const std::size_t j = g.index(nx, ny);
        if (done[j]) continue;
        if (!seen[j] || c.value() < best[j].value() - 1e-12) {
          seen[j] = 1;
          best[j] = c;
          pq.push({c.value(), j});
        }
      }
    }
  }
  return std::nullopt;
}

// Moves along a planned path; nullopt if two consecutive poses are not
// neighbouring cells.
inline std::optional<MoveCount> count_moves(const PlannerGrid& pg, const GlobalPath& path) {
  MoveCount m;
  for (std::size_t i = 1; i < path.poses.size(); ++i) {
    const CellIndex a = pg.base().world_to_cell(path.poses[i - 1]);
    const CellIndex b = pg.base().world_to_cell(path.poses[i]);
    const int dx = std::abs(a.x - b.x), dy = std::abs(a.y - b.y);
    if (std::max(dx, dy) > 1) return std::nullopt;
    if (dx + dy == 2) ++m.diagonal;
    if (dx + dy == 1) ++m.straight;
  }
  return m;
}

struct SubgoalOracle {
  bool goal_inside = false;
  bool crosses = false;
  Vec2 point;
};

// Walks the path in 1 mm arclength steps and reports the last step across
// which distance-to-robot passes through d_ahead.
inline SubgoalOracle dense_subgoal(const GlobalPath& path, const Vec2& p, double d_ahead) {
  SubgoalOracle out;
  if (distance(path.goal(), p) < d_ahead) {
    out.goal_inside = true;
    out.point = path.goal();
    return out;
  }
  const double step = 1e-3;
  const int n = static_cast<int>(path.total_length / step);
  auto f = [&](double s) { return distance(path_query(path, std::min(s, path.total_length)), p) - d_ahead; };
  double prev = f(0.0);
  for (int k = 1; k <= n + 1; ++k) {
    const double s = std::min(k * step, path.total_length);
    const double cur = f(s);
    if ((prev <= 0.0) != (cur <= 0.0) || cur == 0.0) {
      out.crosses = true;
      out.point = path_query(path, s);
    }
    prev = cur;
  }
  return out;
}

inline GlobalPath random_polyline(Rng& rng) {
  const int n = uniform_int(rng, 2, 8);
  std::vector<Vec2> pts;
  for (int i = 0; i < n; ++i) pts.push_back({uniform(rng, 0.0, 10.0), uniform(rng, 0.0, 10.0)});
  return GlobalPath::from_poses(std::move(pts));
}

}  // namespace navarena::testutil
