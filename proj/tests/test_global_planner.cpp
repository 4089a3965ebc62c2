#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <queue>

#include "navarena/global_planner.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace navarena;

using testutil::MoveCount;
using testutil::dijkstra;

TEST(Inflate, ZeroRadiusIsIdentity) {
  Rng rng(1);
  const OccupancyGrid g = testutil::random_grid(25, 25, 0.1, 0.2, rng);
  const PlannerGrid pg = inflate(g, 0.0);
  for (int y = 0; y < 25; ++y) {
    for (int x = 0; x < 25; ++x) EXPECT_EQ(pg.blocked(x, y), g.occupied(x, y));
  }
}

TEST(Inflate, MatchesBruteForceDistance) {
  Rng rng(2);
  for (double radius : {0.1, 0.15, 0.25, 0.35}) {
    const OccupancyGrid g = testutil::random_grid(30, 30, 0.1, 0.05, rng);
    const PlannerGrid pg = inflate(g, radius);
    for (int y = 0; y < 30; ++y) {
      for (int x = 0; x < 30; ++x) {
        bool expect = false;
        for (int oy = 0; oy < 30 && !expect; ++oy) {
          for (int ox = 0; ox < 30 && !expect; ++ox) {
            if (g.occupied(ox, oy) && distance(g.cell_center(x, y), g.cell_center(ox, oy)) <= radius + 1e-9) {
              expect = true;
            }
          }
        }
        EXPECT_EQ(pg.blocked(x, y), expect) << x << "," << y << " r=" << radius;
      }
    }
  }
}

TEST(Inflate, SingleCellOneCellRadius) {
  OccupancyGrid g(9, 9, 0.1);
  g.set_occupied(4, 4, true);
  const PlannerGrid pg = inflate(g, 0.1);
  // Centers within one cell width: the 4-neighbourhood plus the cell itself.
  for (int y = 2; y <= 6; ++y) {
    for (int x = 2; x <= 6; ++x) {
      const int d2 = (x - 4) * (x - 4) + (y - 4) * (y - 4);
      EXPECT_EQ(pg.blocked(x, y), d2 <= 1) << x << "," << y;
    }
  }
}

TEST(Inflate, HugeRadiusBlocksEverything) {
  OccupancyGrid g(12, 8, 0.1);
  const PlannerGrid pg = inflate(g, 5.0);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 12; ++x) EXPECT_TRUE(pg.blocked(x, y));
  }
}

TEST(AStar, SameCellGivesSinglePose) {
  OccupancyGrid g(10, 10, 0.1);
  const PlannerGrid pg = inflate(g, 0.0);
  const GlobalPath p = plan_astar(pg, {0.51, 0.52}, {0.55, 0.58});
  ASSERT_EQ(p.poses.size(), 1u);
  EXPECT_NEAR(p.total_length, 0.0, 1e-12);
}

TEST(AStar, CornerToCornerDiagonal) {
  // 10x10 free interior inside a border ring.
  OccupancyGrid g(12, 12, 0.1);
  const PlannerGrid pg = inflate(g, 0.0);
  const GlobalPath p = plan_astar(pg, g.cell_center(1, 1), g.cell_center(10, 10));
  EXPECT_NEAR(p.total_length, 9 * std::sqrt(2.0) * 0.1, 1e-12);
  EXPECT_NEAR(p.grid_cost, 9 * std::sqrt(2.0) * 0.1, 1e-12);
}

TEST(AStar, WalledOffGoal) {
  OccupancyGrid g(20, 20, 0.1);
  for (int y = 0; y < 20; ++y) g.set_occupied(10, y, true);
  const PlannerGrid pg = inflate(g, 0.0);
  EXPECT_THROW(plan_astar(pg, g.cell_center(3, 3), g.cell_center(15, 3)), NoPathError);
  EXPECT_THROW(plan_astar(pg, g.cell_center(10, 3), g.cell_center(15, 3)), InvalidEndpointError);
}

TEST(AStar, OptimalAgainstDijkstra) {
  Rng rng(77);
  int compared = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const OccupancyGrid g = testutil::random_grid(20, 20, 0.1, 0.1, rng);
    const PlannerGrid pg = inflate(g, 0.1);
    CellIndex s, t;
    do {
      s = {uniform_int(rng, 1, 18), uniform_int(rng, 1, 18)};
    } while (pg.blocked(s));
    do {
      t = {uniform_int(rng, 1, 18), uniform_int(rng, 1, 18)};
    } while (pg.blocked(t));
    const auto oracle = dijkstra(pg, s, t);
    if (!oracle) {
      EXPECT_THROW(plan_astar(pg, g.cell_center(s), g.cell_center(t)), NoPathError);
      continue;
    }
    const GlobalPath p = plan_astar(pg, g.cell_center(s), g.cell_center(t));
    EXPECT_EQ(testutil::count_moves(pg, p), oracle) << "trial " << trial;
    EXPECT_NEAR(p.grid_cost, oracle->value() * 0.1, 1e-9);
    for (const auto& pose : p.poses) EXPECT_FALSE(pg.blocked(g.world_to_cell(pose)));
    ++compared;
  }
  EXPECT_GT(compared, 50);
}

TEST(AStar, OctileHeuristicIsAdmissible) {
  Rng rng(8);
  const OccupancyGrid g = testutil::random_grid(20, 20, 0.1, 0.15, rng);
  const PlannerGrid pg = inflate(g, 0.0);
  for (int i = 0; i < 200; ++i) {
    const CellIndex a{uniform_int(rng, 1, 18), uniform_int(rng, 1, 18)};
    const CellIndex b{uniform_int(rng, 1, 18), uniform_int(rng, 1, 18)};
    if (pg.blocked(a) || pg.blocked(b)) continue;
    const auto d = dijkstra(pg, a, b);
    if (d) EXPECT_LE(octile_distance(a, b), d->value() + 1e-12);
  }
}

TEST(AStar, EndpointsAreExact) {
  OccupancyGrid g(30, 30, 0.1);
  const PlannerGrid pg = inflate(g, 0.0);
  const Vec2 s{0.523, 0.611}, t{2.347, 1.902};
  const GlobalPath p = plan_astar(pg, s, t);
  EXPECT_EQ(p.poses.front(), s);
  EXPECT_EQ(p.poses.back(), t);
  EXPECT_NEAR(p.cumulative_arclength.back(), p.total_length, 1e-12);
}

TEST(PlanFrom, StartInsideInflation) {
  OccupancyGrid g(40, 40, 0.1);
  for (int y = 0; y < 40; ++y) g.set_occupied(20, y < 30 ? y : 0, true);
  const PlannerGrid pg = inflate(g, 0.35);
  const Vec2 start{1.8, 1.0};  // within 0.35 m of the wall
  ASSERT_TRUE(pg.blocked(g.world_to_cell(start)));
  const GlobalPath p = plan_from(pg, start, {3.0, 1.0});
  EXPECT_EQ(p.poses.front(), start);
  EXPECT_EQ(p.poses.back(), (Vec2{3.0, 1.0}));
}

TEST(PathQuery, Interpolation) {
  const GlobalPath p = GlobalPath::from_poses({{0, 0}, {2, 0}});
  EXPECT_EQ(path_query(p, 0.0), (Vec2{0, 0}));
  EXPECT_EQ(path_query(p, 2.0), (Vec2{2, 0}));
  EXPECT_EQ(path_query(p, 0.5), (Vec2{0.5, 0}));
  EXPECT_THROW(path_query(p, 2.5), std::out_of_range);
  const GlobalPath q = GlobalPath::from_poses({{0, 0}, {1, 0}, {1, 1}});
  EXPECT_NEAR(q.total_length, 2.0, 1e-15);
  const Vec2 m = path_query(q, 1.5);
  EXPECT_NEAR(m.x, 1.0, 1e-15);
  EXPECT_NEAR(m.y, 0.5, 1e-15);
  EXPECT_NEAR(distance_to_path(q, {2.0, 0.5}), 1.0, 1e-15);
}
