#pragma once

#include <array>

#include "navarena/reward.hpp"

namespace navarena::testutil {

struct RewardCase {
  const char* name;
  StepSnapshot prev;
  StepSnapshot curr;
  double expected;
};

// Snapshot fields: goal_distance, min_clearance, displacement, collision, goal_reached.
// Expected totals are written out from the reward constants by hand.
inline const std::array<RewardCase, 20> kRewardCases = {{
    {"progress", {2.0, 1.0, 0.0}, {1.8, 1.0, 0.03}, 0.25 * 0.2},
    {"retreat", {1.8, 1.0, 0.0}, {2.0, 1.0, 0.03}, 0.4 * -0.2},
    {"stationary far", {2.0, 1.0, 0.0}, {2.0, 1.0, 0.0}, -0.01},
    {"goal reached", {0.32, 1.0, 0.0}, {0.30, 1.0, 0.02, false, true}, 15.0 + 0.25 * 0.02},
    {"collision approaching", {1.0, 1.0, 0.0}, {0.98, 0.2, 0.03, true}, -10.0 + 0.25 * 0.02},
    {"danger approaching", {1.0, 1.0, 0.0}, {0.97, 0.4, 0.03}, -0.15 + 0.25 * 0.03},
    {"clearance exactly d_safe", {1.0, 1.0, 0.0}, {0.97, 0.5, 0.03}, 0.25 * 0.03},
    {"clearance just inside d_safe", {1.0, 1.0, 0.0}, {0.97, 0.4999, 0.03}, -0.15 + 0.25 * 0.03},
    {"collision without motion", {1.0, 1.0, 0.0}, {1.0, 0.1, 0.0, true}, -10.0 - 0.01},
    {"goal in danger zone", {0.4, 1.0, 0.0}, {0.29, 0.3, 0.11, false, true}, 15.0 - 0.15 + 0.25 * 0.11},
    {"retreat in danger", {1.0, 1.0, 0.0}, {1.1, 0.45, 0.1}, -0.15 + 0.4 * -0.1},
    {"stationary in danger", {1.0, 1.0, 0.0}, {1.0, 0.35, 0.0}, -0.15 - 0.01},
    {"collision retreating", {1.0, 1.0, 0.0}, {1.05, 0.25, 0.05, true}, -10.0 + 0.4 * -0.05},
    {"rotation only", {3.0, 2.0, 0.0}, {3.0, 2.0, 0.0}, -0.01},
    {"sideways move", {3.0, 2.0, 0.0}, {3.0, 2.0, 0.02}, 0.0},
    {"large progress", {5.0, 3.0, 0.0}, {4.5, 3.0, 0.5}, 0.25 * 0.5},
    {"large retreat", {4.5, 3.0, 0.0}, {5.0, 3.0, 0.5}, 0.4 * -0.5},
    {"reached and collided", {0.35, 1.0, 0.0}, {0.28, 0.1, 0.07, true, true}, 15.0 - 10.0 + 0.25 * 0.07},
    {"tiny progress", {1.0, 0.8, 0.0}, {0.999, 0.8, 0.001}, 0.25 * 0.001},
    {"tiny retreat in danger", {1.0, 0.1, 0.0}, {1.001, 0.49, 0.001}, -0.15 + 0.4 * -0.001},
}};

}  // namespace navarena::testutil
