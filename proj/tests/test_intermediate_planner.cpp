#include <gtest/gtest.h>

#include "navarena/intermediate_planner.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace navarena;

TEST(Subgoal, StraightPathExamples) {
  const GlobalPath path = GlobalPath::from_poses({{0, 0}, {10, 0}});
  const SubgoalResult a = compute_subgoal(path, {2, 0}, 1.55);
  EXPECT_EQ(a.kind, SubgoalResult::Kind::kIntersection);
  EXPECT_NEAR(a.point.x, 3.55, 1e-12);
  EXPECT_NEAR(a.point.y, 0.0, 1e-12);
  EXPECT_NEAR(a.arclength, 3.55, 1e-12);

  const SubgoalResult b = compute_subgoal(path, {9.5, 0}, 1.55);
  EXPECT_EQ(b.kind, SubgoalResult::Kind::kGoalInside);
  EXPECT_EQ(b.point, (Vec2{10, 0}));

  EXPECT_TRUE(compute_subgoal(path, {50, 50}, 1.55).needs_replan());
  EXPECT_THROW(compute_subgoal(GlobalPath{}, {0, 0}, 1.0), std::invalid_argument);
}

TEST(Subgoal, PicksLargestArclengthOnLoop) {
  // U-shaped path: the circle around (1, 1) crosses both legs; the later leg wins.
  const GlobalPath path = GlobalPath::from_poses({{0, 0}, {4, 0}, {4, 2}, {0, 2}});
  const SubgoalResult r = compute_subgoal(path, {1, 1}, 1.2);
  ASSERT_EQ(r.kind, SubgoalResult::Kind::kIntersection);
  EXPECT_NEAR(r.point.y, 2.0, 1e-12);
  EXPECT_LT(r.point.x, 1.0);
}

TEST(Subgoal, DenseSamplingOracle) {
  Rng rng(99);
  int crossings = 0, replans = 0;
  for (int q = 0; q < 300; ++q) {
    const GlobalPath path = testutil::random_polyline(rng);
    const Vec2 p{uniform(rng, -1.0, 11.0), uniform(rng, -1.0, 11.0)};
    const double d = uniform(rng, 0.5, 4.0);
    const testutil::SubgoalOracle o = testutil::dense_subgoal(path, p, d);
    const SubgoalResult r = compute_subgoal(path, p, d);
    EXPECT_EQ(r.needs_replan(), !o.goal_inside && !o.crosses) << q;
    if (!r.needs_replan()) {
      EXPECT_LE(distance(r.point, o.point), 2e-3) << q;
      EXPECT_LE(distance(r.point, p), d + 1e-6);
      EXPECT_LE(distance_to_path(path, r.point), 1e-6);
    }
    o.crosses ? ++crossings : ++replans;
  }
  EXPECT_GT(crossings, 50);
  EXPECT_GT(replans, 10);
}

TEST(Subgoal, ArclengthMonotoneAlongStraightFollowing) {
  const GlobalPath path = GlobalPath::from_poses({{0, 0}, {3, 0}, {3, 3}, {6, 3}, {6, 8}});
  double last = -1.0;
  for (double s = 0.0; s <= path.total_length; s += 0.05) {
    const SubgoalResult r = compute_subgoal(path, path_query(path, s), 1.55);
    ASSERT_FALSE(r.needs_replan());
    EXPECT_GE(r.arclength, last - 1e-12);
    last = r.arclength;
  }
}

TEST(ShouldReplan, Examples) {
  const GlobalPath path = GlobalPath::from_poses({{0, 0}, {10, 0}});
  HorizonParams hp;
  SubgoalState st;
  st.last_progress_time = 0.0;
  RobotState r;
  r.x = 2.0;
  r.v = 0.3;
  EXPECT_FALSE(should_replan(st, r, path, hp, 100.0));
  r.v = 0.0;
  EXPECT_FALSE(should_replan(st, r, path, hp, 4.0));
  EXPECT_TRUE(should_replan(st, r, path, hp, 4.1));
  r.v = 0.3;
  r.y = 2.0;
  EXPECT_TRUE(should_replan(st, r, path, hp, 0.5));
  r.y = 0.99;
  EXPECT_FALSE(should_replan(st, r, path, hp, 0.5));
}

TEST(HorizonParams, RejectsNonPositive) {
  HorizonParams hp;
  hp.d_ahead = 0.0;
  EXPECT_THROW(hp.validate(), std::invalid_argument);
}

class Staged : public ::testing::Test {
 protected:
  Staged() : grid_(inflate(OccupancyGrid(120, 120, 0.1), 0.35)) {}
  PlannerGrid grid_;
};

TEST_F(Staged, OnPathMovingRobotNeverReplans) {
  IntermediatePlanner ip(grid_, {10.0, 6.0}, HorizonParams{});
  ip.reset({2.0, 6.0}, 0.0);
  RobotState r;
  r.y = 6.0;
  r.v = 0.3;
  for (int k = 0; k < 200; ++k) {
    r.x = 2.0 + 0.03 * k;
    const Vec2 g = ip.update(r, 0.1 * k);
    const SubgoalResult expect = compute_subgoal(ip.state().path, r.position(), 1.55);
    EXPECT_EQ(g, expect.point);
  }
  EXPECT_EQ(ip.state().replan_count, 0);
}

TEST_F(Staged, StationaryRobotReplansOnceAfterTimeLimit) {
  IntermediatePlanner ip(grid_, {10.0, 6.0}, HorizonParams{});
  ip.reset({2.0, 6.0}, 0.0);
  RobotState r;
  r.x = 2.0;
  r.y = 6.0;
  for (int k = 1; k <= 40; ++k) {
    ip.update(r, 0.1 * k);
    EXPECT_EQ(ip.state().replan_count, 0) << k;
  }
  for (int k = 41; k <= 50; ++k) ip.update(r, 0.1 * k);
  EXPECT_EQ(ip.state().replan_count, 1);
}

TEST_F(Staged, TeleportedRobotReplansFromCurrentPosition) {
  IntermediatePlanner ip(grid_, {10.0, 6.0}, HorizonParams{});
  ip.reset({2.0, 6.0}, 0.0);
  RobotState r;
  r.x = 4.0;
  r.y = 8.0;
  r.v = 0.3;
  ip.update(r, 0.1);
  EXPECT_EQ(ip.state().replan_count, 1);
  EXPECT_EQ(ip.state().path.poses.front(), r.position());
  EXPECT_LE(distance(ip.state().subgoal, r.position()), 1.55 + 1e-6);
}

TEST_F(Staged, UnreachableGoalPropagatesNoPath) {
  OccupancyGrid g(60, 60, 0.1);
  for (int y = 0; y < 60; ++y) g.set_occupied(30, y, true);
  const PlannerGrid pg = inflate(g, 0.35);
  IntermediatePlanner ip(pg, {5.0, 3.0}, HorizonParams{});
  EXPECT_THROW(ip.reset({1.0, 3.0}, 0.0), NoPathError);
}
