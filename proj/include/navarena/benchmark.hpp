#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "navarena/global_planner.hpp"
#include "navarena/grid.hpp"
#include "navarena/intermediate_planner.hpp"
#include "navarena/local_planner.hpp"
#include "navarena/network.hpp"
#include "navarena/world.hpp"

namespace navarena {

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

struct Scenario {
  std::string name;
  // Map from a file, or generated from `map_gen` with `map_seed` when empty.
  std::filesystem::path map_file;
  MapGenParams map_gen;
  std::uint64_t map_seed = 0;
  int n_obstacles = 0;
  double v_obs = 0.0;
  MotionModel model = MotionModel::kLinearBounce;
  std::optional<double> heading_axis;  // rad, linear-bounce only
  std::optional<std::pair<Vec2, Vec2>> spawn_region;
  double start_keep_out = 1.0;
  double goal_keep_out = 0.6;
  Pose2 start;
  Vec2 goal;
  int repeats = 1;
  std::uint64_t seed_base = 0;

  void validate() const;
  OccupancyGrid load_grid() const;
};

/// Settings shared by every episode of a suite.
struct EpisodeParams {
  WorldConfig world;
  HorizonParams horizon;
  DwaParams dwa;
  double timeout_s = 180.0;
  double inflation_radius = 0.35;  // global-planner costmap dilation, m
  bool greedy_policy = true;

  void validate() const;
  int max_steps() const;
};

struct PlannerSpec {
  std::string name;  // "dwa" or "arena"
  std::shared_ptr<const NetworkParams> params;  // required for "arena"
};

std::unique_ptr<LocalPlanner> make_local_planner(const PlannerSpec& spec, const EpisodeParams& ep,
                                                 std::uint64_t seed);

struct RunResult {
  std::string planner;
  std::string scenario;
  int run = 0;
  double time_to_goal = 0.0;  // simulated seconds; the timeout when the goal is not reached
  double path_length = 0.0;
  int collisions = 0;
  bool reached_goal = false;
  bool success = false;
  bool timeout = false;
  int replans = 0;
  bool failed = false;  // planner error; see diagnostic
  std::string diagnostic;
  std::vector<Vec2> trajectory;
  std::vector<Vec2> collision_points;
  std::vector<ObstacleState> initial_obstacles;
};

/// Per-run seed shared by all planners so they face identical worlds.
std::uint64_t run_seed(const Scenario& scenario, int run);

/// Initial obstacle set of one run.
std::vector<ObstacleState> scenario_obstacles(const Scenario& scenario, const OccupancyGrid& grid,
                                              int run);

/// Runs one episode of the hierarchical stack until the goal is reached or
/// the timeout expires. Collisions count rising edges of the contact flag.
RunResult run_episode(const PlannerSpec& planner, const Scenario& scenario, int run,
                      const EpisodeParams& params, const OccupancyGrid& grid,
                      const PlannerGrid& pgrid);
RunResult run_episode(const PlannerSpec& planner, const Scenario& scenario, int run,
                      const EpisodeParams& params);

struct AggregateStats {
  std::string planner;
  std::string scenario;
  int runs = 0;
  double mean_time_s = 0.0;  // over all runs, timeouts counted at the timeout
  double mean_path_m = 0.0;
  int total_collisions = 0;
  double mean_collisions = 0.0;
  double success_pct = 0.0;
  int timeouts = 0;
  int failures = 0;
};

/// One row per (planner, scenario) in first-seen order.
std::vector<AggregateStats> aggregate(const std::vector<RunResult>& records);

struct SuiteResult {
  std::vector<RunResult> records;  // planner-major, then scenario, then run
  std::vector<AggregateStats> stats;
};

/// Executes every (planner, scenario, run) combination on up to
/// `parallelism` threads. Output order does not depend on scheduling.
SuiteResult run_suite(const std::vector<PlannerSpec>& planners,
                      const std::vector<Scenario>& scenarios, const EpisodeParams& params,
                      int parallelism);

struct RelativeMetric {
  double raw = 1.0;    // planner / reference
  double score = 1.0;  // oriented so that > 1 means better than the reference
  bool saturated = false;
};

struct RelativeRow {
  std::string planner;
  RelativeMetric time;
  RelativeMetric path;
  RelativeMetric collisions;
  RelativeMetric success;
  double overall_pct = 0.0;  // sum of the four scores in percent
};

inline constexpr double kRelativeCap = 10.0;

/// Compares each planner's overall values (pooled over scenarios) against the
/// reference planner. Lower-is-better metrics score as reference / planner.
/// A zero denominator saturates at kRelativeCap with the flag set; 0 / 0 is 1.
std::vector<RelativeRow> relative_performance(const std::vector<AggregateStats>& stats,
                                              const std::string& reference);

// Column order of the per-run CSV.
inline constexpr const char* kRunCsvHeader =
    "planner,scenario,run,time_s,path_m,collisions,success,timeout,replans";

std::string format_runs_csv(const std::vector<RunResult>& records);
void export_csv(const std::vector<RunResult>& records, const std::filesystem::path& path);
std::vector<RunResult> parse_runs_csv(const std::string& text);
std::vector<RunResult> load_runs_csv(const std::filesystem::path& path);

std::string format_stats_csv(const std::vector<AggregateStats>& stats);
std::string format_relative_csv(const std::vector<RelativeRow>& rows, const std::string& reference);

/// Trajectory store used for replay rendering.
std::string format_trajectories(const std::vector<RunResult>& records, int stride = 1);
std::vector<RunResult> parse_trajectories(const std::string& text);
void save_trajectories(const std::vector<RunResult>& records, const std::filesystem::path& path,
                       int stride = 1);
std::vector<RunResult> load_trajectories(const std::filesystem::path& path);

struct SvgOptions {
  std::optional<Vec2> start;
  std::optional<Vec2> goal;
  double pixels_per_meter = 50.0;
};

/// Opacity of a trajectory segment: the share of the planner's trajectories
/// that visit the map cell containing the segment midpoint.
std::vector<std::vector<double>> segment_opacities(const std::vector<RunResult>& records,
                                                   const OccupancyGrid& grid);

/// Static rendering in map coordinates (a y-flipping transform on the root
/// group): occupied cells, initial obstacle velocities as arrows, robot
/// trajectories coloured per planner, collision points as circles.
std::string render_svg(const std::vector<RunResult>& records, const OccupancyGrid& grid,
                       const SvgOptions& options = {});
void export_svg(const std::vector<RunResult>& records, const OccupancyGrid& grid,
                const std::filesystem::path& path, const SvgOptions& options = {});

struct Suite {
  std::string name;
  std::vector<std::string> planners;
  std::vector<Scenario> scenarios;
  EpisodeParams episode;
};

class SuiteFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// INI suite file: [suite], optional [episode], and one [scenario NAME]
/// section per scenario. Relative map paths resolve against `base_dir`.
Suite parse_suite(const std::string& text, const std::filesystem::path& base_dir = {});
Suite load_suite(const std::filesystem::path& path);

/// The 3x3 matrix of obstacle counts {5, 10, 20} and speeds {0.1, 0.2, 0.3}
/// on an empty 12 x 12 m map.
Suite default_suite(int repeats = 100);

}  // namespace navarena
