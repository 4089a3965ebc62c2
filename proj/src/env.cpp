#include "navarena/env.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace navarena {

void EnvConfig::validate() const {
  world.validate();
  if (map.width < 3 || map.height < 3 || !(map.resolution > 0.0)) {
    throw std::invalid_argument("training map too small");
  }
  if (max_walls < 0 || max_static < 0) throw std::invalid_argument("negative map feature count");
  if (!(goal_min_distance > world.d_goal) || goal_max_distance < goal_min_distance) {
    throw std::invalid_argument("invalid goal distance range");
  }
  if (!(max_detour >= 1.0)) throw std::invalid_argument("max_detour must be >= 1");
  if (v_obs_min < 0.0 || v_obs_max < v_obs_min) throw std::invalid_argument("invalid obstacle speeds");
  if (motion_models.empty()) throw std::invalid_argument("need at least one motion model");
  if (max_episode_steps < 1) throw std::invalid_argument("max_episode_steps must be positive");
}

NavigationEnv::NavigationEnv(const EnvConfig& config, std::uint64_t seed, DiscreteActionSet actions)
    : config_(config), seed_(seed), actions_(std::move(actions)) {
  config_.validate();
}

int NavigationEnv::obstacle_count() const {
  return world_ ? static_cast<int>(world_->obstacles().size()) : 0;
}

namespace {

struct EpisodeLayout {
  OccupancyGrid grid;
  RobotState robot;
  Vec2 goal;
};

std::optional<Vec2> random_free_point(const PlannerGrid& pgrid, Rng& rng) {
  const OccupancyGrid& g = pgrid.base();
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const int cx = uniform_int(rng, 1, g.width() - 2);
    const int cy = uniform_int(rng, 1, g.height() - 2);
    if (!pgrid.blocked(cx, cy)) return g.cell_center(cx, cy);
  }
  return std::nullopt;
}

std::optional<EpisodeLayout> sample_layout(const EnvConfig& cfg, Rng& rng) {
  MapGenParams mp = cfg.map;
  mp.n_walls = uniform_int(rng, 0, cfg.max_walls);
  mp.n_static = uniform_int(rng, 0, cfg.max_static);
  EpisodeLayout out;
  out.grid = generate_random_map(rng(), mp);
  const PlannerGrid pgrid = inflate(out.grid, cfg.start_clearance);

  for (int attempt = 0; attempt < 50; ++attempt) {
    const auto start = random_free_point(pgrid, rng);
    if (!start) return std::nullopt;
    for (int g = 0; g < 20; ++g) {
      const double d = uniform(rng, cfg.goal_min_distance, cfg.goal_max_distance);
      const double a = uniform(rng, -std::numbers::pi, std::numbers::pi);
      const Vec2 goal{start->x + d * std::cos(a), start->y + d * std::sin(a)};
      const CellIndex gc = out.grid.world_to_cell(goal);
      if (pgrid.blocked(gc)) continue;
      try {
        const GlobalPath path = plan_astar(pgrid, *start, goal);
        if (path.total_length > cfg.max_detour * distance(*start, goal)) continue;
      } catch (const NoPathError&) {
        continue;
      }
      out.robot.x = start->x;
      out.robot.y = start->y;
      out.robot.theta = uniform(rng, -std::numbers::pi, std::numbers::pi);
      out.goal = goal;
      return out;
    }
  }
  return std::nullopt;
}

EpisodeLayout trivial_layout(const EnvConfig& cfg) {
  EpisodeLayout out;
  out.grid = OccupancyGrid(cfg.map.width, cfg.map.height, cfg.map.resolution);
  out.robot.x = out.grid.width_m() / 2.0;
  out.robot.y = out.grid.height_m() / 2.0 - cfg.trivial_goal_distance / 2.0;
  out.robot.theta = std::numbers::pi / 2.0;
  out.goal = {out.robot.x, out.robot.y + cfg.trivial_goal_distance};
  return out;
}

}  // namespace

Observation NavigationEnv::reset(int n_obstacles) {
  const std::uint64_t ep_seed = derive_seed(derive_seed(seed_, SeedStream::kEpisode), episodes_);
  ++episodes_;
  Rng rng(derive_seed(ep_seed, SeedStream::kMap));

  std::optional<EpisodeLayout> layout;
  if (config_.trivial) {
    layout = trivial_layout(config_);
  } else {
    for (int attempt = 0; attempt < 20 && !layout; ++attempt) layout = sample_layout(config_, rng);
    if (!layout) throw std::runtime_error("could not sample a training episode layout");
  }
  layout->robot.radius = config_.world.robot_radius;

  SpawnOptions so;
  so.radius = config_.obstacle_radius;
  so.keep_out = {{layout->robot.position(), config_.start_keep_out},
                 {layout->goal, config_.goal_keep_out}};
  const MotionModel model = config_.motion_models[static_cast<std::size_t>(
      uniform_int(rng, 0, static_cast<int>(config_.motion_models.size()) - 1))];
  const double v_obs = uniform(rng, config_.v_obs_min, config_.v_obs_max);
  std::vector<ObstacleState> obstacles;
  const std::uint64_t obs_seed = derive_seed(ep_seed, SeedStream::kObstacles);
  for (int n = std::max(0, n_obstacles); n >= 0; --n) {
    try {
      obstacles = spawn_obstacles(layout->grid, n, v_obs, model, obs_seed, so);
      break;
    } catch (const SpawnError&) {
    }
  }

  WorldConfig wc = config_.world;
  wc.seed = derive_seed(ep_seed, SeedStream::kWorld);
  world_.emplace(std::move(layout->grid), wc, layout->robot, std::move(obstacles));
  goal_ = layout->goal;
  episode_steps_ = 0;

  const LidarScan scan = world_->scan();
  prev_ = snapshot(scan, world_->robot().position());
  return build_observation(scan, world_->robot(), goal_);
}

StepSnapshot NavigationEnv::snapshot(const LidarScan& scan, const Vec2& prev_position) const {
  const RobotState& r = world_->robot();
  StepSnapshot s;
  s.goal_distance = distance(r.position(), goal_);
  s.min_clearance = scan.min_range();
  s.displacement = distance(r.position(), prev_position);
  s.collision = world_->in_collision() || s.min_clearance < r.radius;
  s.goal_reached = s.goal_distance < config_.world.d_goal;
  return s;
}

EnvStep NavigationEnv::step(std::size_t action_index) {
  if (!world_) throw std::logic_error("step() before reset()");
  const Vec2 before = world_->robot().position();
  world_->step(actions_[action_index]);
  ++episode_steps_;
  const LidarScan scan = world_->scan();
  const StepSnapshot curr = snapshot(scan, before);

  EnvStep out;
  out.reward = compute_reward(prev_, curr, config_.reward);
  out.collision = curr.collision;
  out.success = curr.goal_reached && !curr.collision;
  out.terminal = curr.goal_reached || curr.collision;
  out.truncated = !out.terminal && episode_steps_ >= config_.max_episode_steps;
  out.observation = build_observation(scan, world_->robot(), goal_);
  prev_ = curr;
  return out;
}

}  // namespace navarena
