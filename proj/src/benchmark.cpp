#include "navarena/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>

namespace navarena {

namespace {

bool valid_name(const std::string& s) {
  return !s.empty() && std::none_of(s.begin(), s.end(), [](char c) {
    return c == ',' || c == '"' || std::isspace(static_cast<unsigned char>(c));
  });
}

}  // namespace

void Scenario::validate() const {
  if (!valid_name(name)) {
    throw std::invalid_argument("scenario name must be non-empty without commas or spaces: '" + name + "'");
  }
  if (n_obstacles < 0) throw std::invalid_argument(name + ": negative obstacle count");
  if (!(v_obs >= 0.0)) throw std::invalid_argument(name + ": v_obs must be >= 0");
  if (repeats < 1) throw std::invalid_argument(name + ": repeats must be >= 1");
  if (spawn_region && !(spawn_region->first.x < spawn_region->second.x &&
                        spawn_region->first.y < spawn_region->second.y)) {
    throw std::invalid_argument(name + ": empty spawn region");
  }
}

OccupancyGrid Scenario::load_grid() const {
  if (!map_file.empty()) return load_map(map_file);
  if (map_gen.n_walls == 0 && map_gen.n_static == 0) {
    return OccupancyGrid(map_gen.width, map_gen.height, map_gen.resolution);
  }
  return generate_random_map(map_seed, map_gen);
}

void EpisodeParams::validate() const {
  world.validate();
  horizon.validate();
  dwa.validate();
  if (!(timeout_s > 0.0)) throw std::invalid_argument("timeout must be positive");
  if (inflation_radius < 0.0) throw std::invalid_argument("inflation radius must be >= 0");
}

int EpisodeParams::max_steps() const {
  return static_cast<int>(std::lround(timeout_s / world.dt));
}

std::unique_ptr<LocalPlanner> make_local_planner(const PlannerSpec& spec, const EpisodeParams& ep,
                                                 std::uint64_t seed) {
  if (spec.name == "dwa") {
    DwaParams p = ep.dwa;
    p.robot_radius = ep.world.robot_radius;
    return std::make_unique<DwaPlanner>(p);
  }
  if (spec.name == "arena") {
    if (!spec.params) throw std::invalid_argument("the arena planner needs trained parameters");
    return std::make_unique<PolicyPlanner>(
        spec.params, ep.greedy_policy ? PolicyMode::kGreedy : PolicyMode::kSample, seed);
  }
  throw std::invalid_argument("unknown planner '" + spec.name + "'");
}

std::uint64_t run_seed(const Scenario& scenario, int run) {
  return scenario.seed_base + static_cast<std::uint64_t>(run);
}

std::vector<ObstacleState> scenario_obstacles(const Scenario& scenario, const OccupancyGrid& grid,
                                              int run) {
  SpawnOptions so;
  so.heading_axis = scenario.heading_axis;
  so.region = scenario.spawn_region;
  so.keep_out = {{{scenario.start.x, scenario.start.y}, scenario.start_keep_out},
                 {scenario.goal, scenario.goal_keep_out}};
  return spawn_obstacles(grid, scenario.n_obstacles, scenario.v_obs, scenario.model,
                         derive_seed(run_seed(scenario, run), SeedStream::kObstacles), so);
}

RunResult run_episode(const PlannerSpec& planner, const Scenario& scenario, int run,
                      const EpisodeParams& params, const OccupancyGrid& grid,
                      const PlannerGrid& pgrid) {
  RunResult r;
  r.planner = planner.name;
  r.scenario = scenario.name;
  r.run = run;
  r.time_to_goal = params.timeout_s;
  const std::uint64_t seed = run_seed(scenario, run);
  const Vec2 start{scenario.start.x, scenario.start.y};
  r.trajectory.push_back(start);
  try {
    auto local = make_local_planner(planner, params, derive_seed(seed, SeedStream::kPolicy));
    r.initial_obstacles = scenario_obstacles(scenario, grid, run);
    WorldConfig wc = params.world;
    wc.seed = derive_seed(seed, SeedStream::kWorld);
    RobotState robot;
    robot.x = start.x;
    robot.y = start.y;
    robot.theta = wrap_angle(scenario.start.theta);
    robot.radius = wc.robot_radius;
    World world(grid, wc, robot, r.initial_obstacles);
    IntermediatePlanner mid(pgrid, scenario.goal, params.horizon);
    mid.reset(start, 0.0);
    local->reset();

    const int max_steps = params.max_steps();
    bool contact = world.in_collision();
    if (contact) {
      ++r.collisions;
      r.collision_points.push_back(start);
    }
    for (int k = 0; k <= max_steps; ++k) {
      if (distance(world.robot().position(), scenario.goal) < wc.d_goal) {
        r.reached_goal = true;
        r.time_to_goal = world.time();
        break;
      }
      if (k == max_steps) break;
      const LidarScan scan = world.scan();
      const Vec2 subgoal = mid.update(world.robot(), world.time());
      const Action a = local->plan(scan, world.robot(), subgoal);
      const Vec2 before = world.robot().position();
      world.step(a);
      const Vec2 now = world.robot().position();
      r.path_length += distance(before, now);
      r.trajectory.push_back(now);
      const bool hit = world.in_collision();
      if (hit && !contact) {
        ++r.collisions;
        r.collision_points.push_back(now);
      }
      contact = hit;
    }
    r.replans = mid.state().replan_count;
  } catch (const NoPathError& e) {
    // The stack cannot move toward an unreachable goal; the run ends at the timeout.
    r.diagnostic = e.what();
    r.reached_goal = false;
    r.time_to_goal = params.timeout_s;
  } catch (const std::exception& e) {
    r.failed = true;
    r.diagnostic = e.what();
    r.reached_goal = false;
  }
  r.timeout = !r.reached_goal && !r.failed;
  r.success = r.reached_goal && r.collisions < 2;
  return r;
}

RunResult run_episode(const PlannerSpec& planner, const Scenario& scenario, int run,
                      const EpisodeParams& params) {
  const OccupancyGrid grid = scenario.load_grid();
  const PlannerGrid pgrid = inflate(grid, params.inflation_radius);
  return run_episode(planner, scenario, run, params, grid, pgrid);
}

std::vector<AggregateStats> aggregate(const std::vector<RunResult>& records) {
  std::vector<AggregateStats> out;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  for (const auto& r : records) {
    auto key = std::make_pair(r.planner, r.scenario);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      AggregateStats s;
      s.planner = r.planner;
      s.scenario = r.scenario;
      out.push_back(s);
    }
    AggregateStats& s = out[it->second];
    ++s.runs;
    s.mean_time_s += r.time_to_goal;
    s.mean_path_m += r.path_length;
    s.total_collisions += r.collisions;
    s.success_pct += r.success ? 1.0 : 0.0;
    s.timeouts += r.timeout ? 1 : 0;
    s.failures += r.failed ? 1 : 0;
  }
  for (auto& s : out) {
    const double n = static_cast<double>(s.runs);
    s.mean_time_s /= n;
    s.mean_path_m /= n;
    s.mean_collisions = static_cast<double>(s.total_collisions) / n;
    s.success_pct = 100.0 * s.success_pct / n;
  }
  return out;
}

SuiteResult run_suite(const std::vector<PlannerSpec>& planners,
                      const std::vector<Scenario>& scenarios, const EpisodeParams& params,
                      int parallelism) {
  if (planners.empty()) throw std::invalid_argument("run_suite needs at least one planner");
  if (scenarios.empty()) throw std::invalid_argument("run_suite needs at least one scenario");
  params.validate();
  for (const auto& s : scenarios) s.validate();
  for (const auto& p : planners) {
    if (!valid_name(p.name)) throw std::invalid_argument("invalid planner name '" + p.name + "'");
    if (p.name == "arena" && !p.params) throw std::invalid_argument("the arena planner needs parameters");
  }

  struct Prepared {
    OccupancyGrid grid;
    PlannerGrid pgrid;
  };
  std::vector<Prepared> prepared;
  prepared.reserve(scenarios.size());
  for (const auto& s : scenarios) {
    OccupancyGrid g = s.load_grid();
    PlannerGrid pg = inflate(g, params.inflation_radius);
    prepared.push_back({std::move(g), std::move(pg)});
  }

  struct Job {
    std::size_t planner, scenario;
    int run;
  };
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < planners.size(); ++p) {
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
      for (int k = 0; k < scenarios[s].repeats; ++k) jobs.push_back({p, s, k});
    }
  }

  SuiteResult out;
  out.records.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
      const Job& j = jobs[i];
      out.records[i] = run_episode(planners[j.planner], scenarios[j.scenario], j.run, params,
                                   prepared[j.scenario].grid, prepared[j.scenario].pgrid);
    }
  };
  const int threads = std::max(1, std::min<int>(parallelism, static_cast<int>(jobs.size())));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  out.stats = aggregate(out.records);
  return out;
}

namespace {

RelativeMetric lower_is_better(double planner, double reference) {
  RelativeMetric m;
  if (reference == 0.0 && planner == 0.0) return m;
  if (reference == 0.0) {
    m.raw = kRelativeCap;
    m.score = 1.0 / kRelativeCap;
    m.saturated = true;
  } else if (planner == 0.0) {
    m.raw = 0.0;
    m.score = kRelativeCap;
    m.saturated = true;
  } else {
    m.raw = planner / reference;
    m.score = reference / planner;
  }
  return m;
}

RelativeMetric higher_is_better(double planner, double reference) {
  RelativeMetric m;
  if (reference == 0.0 && planner == 0.0) return m;
  if (reference == 0.0) {
    m.raw = kRelativeCap;
    m.score = kRelativeCap;
    m.saturated = true;
  } else {
    m.raw = planner / reference;
    m.score = m.raw;
  }
  return m;
}

struct Overall {
  double runs = 0, time = 0, path = 0, collisions = 0, successes = 0;
};

}  // namespace

std::vector<RelativeRow> relative_performance(const std::vector<AggregateStats>& stats,
                                              const std::string& reference) {
  std::vector<std::string> order;
  std::map<std::string, Overall> pooled;
  for (const auto& s : stats) {
    if (!pooled.count(s.planner)) order.push_back(s.planner);
    Overall& o = pooled[s.planner];
    o.runs += s.runs;
    o.time += s.mean_time_s * s.runs;
    o.path += s.mean_path_m * s.runs;
    o.collisions += s.total_collisions;
    o.successes += s.success_pct * s.runs / 100.0;
  }
  const auto ref_it = pooled.find(reference);
  if (ref_it == pooled.end()) {
    throw std::invalid_argument("reference planner '" + reference + "' not in statistics");
  }
  const Overall& ref = ref_it->second;
  std::vector<RelativeRow> rows;
  for (const auto& name : order) {
    const Overall& o = pooled[name];
    RelativeRow row;
    row.planner = name;
    row.time = lower_is_better(o.time / o.runs, ref.time / ref.runs);
    row.path = lower_is_better(o.path / o.runs, ref.path / ref.runs);
    row.collisions = lower_is_better(o.collisions / o.runs, ref.collisions / ref.runs);
    row.success = higher_is_better(o.successes / o.runs, ref.successes / ref.runs);
    row.overall_pct =
        100.0 * (row.time.score + row.path.score + row.collisions.score + row.success.score);
    rows.push_back(row);
  }
  return rows;
}

std::string format_runs_csv(const std::vector<RunResult>& records) {
  std::string out = kRunCsvHeader;
  out += '\n';
  for (const auto& r : records) {
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", r.planner, r.scenario, r.run, r.time_to_goal,
                       r.path_length, r.collisions, r.success ? 1 : 0, r.timeout ? 1 : 0, r.replans);
  }
  return out;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

template <typename T>
T parse_number(const std::string& s) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("malformed number '" + s + "'");
  }
  return v;
}

bool parse_flag(const std::string& s) {
  if (s == "1") return true;
  if (s == "0") return false;
  throw std::runtime_error("malformed flag '" + s + "'");
}

}  // namespace

void export_csv(const std::vector<RunResult>& records, const std::filesystem::path& path) {
  write_text(path, format_runs_csv(records));
}

std::vector<RunResult> parse_runs_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty run CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRunCsvHeader) throw std::runtime_error("unexpected run CSV header: " + line);
  std::vector<RunResult> out;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split(line, ',');
    if (f.size() != 9) throw std::runtime_error("run CSV row has " + std::to_string(f.size()) + " fields");
    RunResult r;
    r.planner = f[0];
    r.scenario = f[1];
    r.run = parse_number<int>(f[2]);
    r.time_to_goal = parse_number<double>(f[3]);
    r.path_length = parse_number<double>(f[4]);
    r.collisions = parse_number<int>(f[5]);
    r.success = parse_flag(f[6]);
    r.timeout = parse_flag(f[7]);
    r.replans = parse_number<int>(f[8]);
    // The CSV does not carry these; infer them from the success/timeout rule.
    r.reached_goal = r.success || (!r.timeout && r.collisions >= 2);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RunResult> load_runs_csv(const std::filesystem::path& path) {
  return parse_runs_csv(read_text(path));
}

std::string format_stats_csv(const std::vector<AggregateStats>& stats) {
  std::string out =
      "planner,scenario,runs,mean_time_s,mean_path_m,total_collisions,mean_collisions,success_pct,"
      "timeouts,failures\n";
  for (const auto& s : stats) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", s.planner, s.scenario, s.runs,
                       s.mean_time_s, s.mean_path_m, s.total_collisions, s.mean_collisions,
                       s.success_pct, s.timeouts, s.failures);
  }
  return out;
}

std::string format_relative_csv(const std::vector<RelativeRow>& rows, const std::string& reference) {
  std::string out = fmt::format(
      "# reference={}; raw = planner/reference; score > 1 is better than the reference "
      "(reference/planner for time, path and collisions); saturated at {}\n",
      reference, kRelativeCap);
  out +=
      "planner,time_raw,time_score,path_raw,path_score,collisions_raw,collisions_score,"
      "success_raw,success_score,saturated,overall_pct\n";
  for (const auto& r : rows) {
    std::string sat;
    for (const auto& [name, m] : {std::pair{"time", r.time}, std::pair{"path", r.path},
                                  std::pair{"collisions", r.collisions},
                                  std::pair{"success", r.success}}) {
      if (!m.saturated) continue;
      if (!sat.empty()) sat += ';';
      sat += name;
    }
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", r.planner, r.time.raw, r.time.score,
                       r.path.raw, r.path.score, r.collisions.raw, r.collisions.score,
                       r.success.raw, r.success.score, sat, r.overall_pct);
  }
  return out;
}

std::string format_trajectories(const std::vector<RunResult>& records, int stride) {
  if (stride < 1) throw std::invalid_argument("trajectory stride must be >= 1");
  std::string out = "navarena-trajectories 1\n";
  for (const auto& r : records) {
    out += fmt::format("R {} {} {} {} {}\n", r.planner, r.scenario, r.run, r.success ? 1 : 0,
                       r.collisions);
    out += 'P';
    const std::size_t n = r.trajectory.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (i % static_cast<std::size_t>(stride) != 0 && i + 1 != n) continue;
      out += fmt::format(" {:.3f} {:.3f}", r.trajectory[i].x, r.trajectory[i].y);
    }
    out += "\nC";
    for (const auto& c : r.collision_points) out += fmt::format(" {:.3f} {:.3f}", c.x, c.y);
    out += "\nO";
    for (const auto& o : r.initial_obstacles) {
      out += fmt::format(" {:.3f} {:.3f} {:.3f} {:.3f} {:.3f}", o.position.x, o.position.y,
                         o.velocity.x, o.velocity.y, o.radius);
    }
    out += '\n';
  }
  return out;
}

std::vector<RunResult> parse_trajectories(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "navarena-trajectories 1") {
    throw std::runtime_error("not a trajectory file");
  }
  std::vector<RunResult> out;
  auto numbers = [](const std::string& l, char tag, std::size_t group) {
    if (l.empty() || l[0] != tag) throw std::runtime_error(std::string("expected '") + tag + "' line");
    std::vector<double> v;
    for (const auto& tok : split(l.substr(1), ' ')) {
      if (!tok.empty()) v.push_back(parse_number<double>(tok));
    }
    if (v.size() % group != 0) throw std::runtime_error("truncated trajectory line");
    return v;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ' ');
    if (f.size() != 6 || f[0] != "R") throw std::runtime_error("malformed run header: " + line);
    RunResult r;
    r.planner = f[1];
    r.scenario = f[2];
    r.run = parse_number<int>(f[3]);
    r.success = parse_flag(f[4]);
    r.collisions = parse_number<int>(f[5]);
    std::string p, c, o;
    if (!std::getline(in, p) || !std::getline(in, c) || !std::getline(in, o)) {
      throw std::runtime_error("truncated trajectory record");
    }
    const auto pv = numbers(p, 'P', 2);
    for (std::size_t i = 0; i < pv.size(); i += 2) r.trajectory.push_back({pv[i], pv[i + 1]});
    const auto cv = numbers(c, 'C', 2);
    for (std::size_t i = 0; i < cv.size(); i += 2) r.collision_points.push_back({cv[i], cv[i + 1]});
    const auto ov = numbers(o, 'O', 5);
    for (std::size_t i = 0; i < ov.size(); i += 5) {
      ObstacleState s;
      s.position = {ov[i], ov[i + 1]};
      s.velocity = {ov[i + 2], ov[i + 3]};
      s.radius = ov[i + 4];
      r.initial_obstacles.push_back(s);
    }
    out.push_back(std::move(r));
  }
  return out;
}

void save_trajectories(const std::vector<RunResult>& records, const std::filesystem::path& path,
                       int stride) {
  write_text(path, format_trajectories(records, stride));
}

std::vector<RunResult> load_trajectories(const std::filesystem::path& path) {
  return parse_trajectories(read_text(path));
}

}  // namespace navarena
