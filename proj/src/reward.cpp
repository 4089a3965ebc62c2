#include "navarena/reward.hpp"

namespace navarena {

RewardBreakdown compute_reward(const StepSnapshot& prev, const StepSnapshot& curr,
                               const RewardParams& p) {
  RewardBreakdown r;
  r.r_s = curr.goal_reached ? p.success : 0.0;
  r.r_c = curr.collision ? p.collision : 0.0;
  r.r_d = (!curr.collision && curr.min_clearance < p.d_safe) ? p.danger : 0.0;
  r.r_m = curr.displacement == 0.0 ? p.no_move : 0.0;
  const double progress = prev.goal_distance - curr.goal_distance;
  r.r_p = progress >= 0.0 ? p.w_p * progress : p.w_n * progress;
  r.total = r.r_s + r.r_c + r.r_d + r.r_p + r.r_m;
  return r;
}

}  // namespace navarena
