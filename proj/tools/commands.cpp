#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "navarena/a3c.hpp"
#include "navarena/benchmark.hpp"
#include "navarena/config.hpp"
#include "navarena/grid.hpp"
#include "navarena/network.hpp"

namespace navarena::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

int default_parallelism() {
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(now)));
}

/// Run manifest, written before long work starts and finalized at the end.
class Manifest {
 public:
  Manifest(fs::path path, const std::string& command, const std::vector<std::string>& argv)
      : path_(std::move(path)) {
    doc_["tool"] = "navarena";
    doc_["version"] = NAVARENA_VERSION;
    doc_["command"] = command;
    doc_["argv"] = argv;
    doc_["started_at"] = utc_now();
    doc_["finished_at"] = nullptr;
    doc_["status"] = "running";
  }

  json& operator[](const char* key) { return doc_[key]; }
  void artifact(const std::string& name, const fs::path& p) { doc_["artifacts"][name] = p.string(); }

  void write() const {
    std::ofstream f(path_);
    if (!f) throw std::runtime_error("cannot write manifest " + path_.string());
    f << doc_.dump(2) << '\n';
  }

  void finish(bool ok) {
    doc_["finished_at"] = utc_now();
    doc_["status"] = ok ? "ok" : "failed";
    write();
  }

 private:
  fs::path path_;
  json doc_;
};

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

std::pair<double, double> parse_size(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos) throw UsageError("--size must look like WxH, got '" + s + "'");
  try {
    std::size_t used = 0;
    const double w = std::stod(s.substr(0, x), &used);
    if (used != x) throw std::invalid_argument("width");
    const std::string hs = s.substr(x + 1);
    const double h = std::stod(hs, &used);
    if (used != hs.size()) throw std::invalid_argument("height");
    if (!(w > 0.0) || !(h > 0.0)) throw UsageError("--size must be positive, got '" + s + "'");
    return {w, h};
  } catch (const std::invalid_argument&) {
    throw UsageError("--size must look like WxH, got '" + s + "'");
  }
}

}  // namespace

int cmd_gen_map(const GenMapOptions& o, const std::vector<std::string>& argv) {
  const auto [w, h] = parse_size(o.size);
  if (!(o.resolution > 0.0)) throw UsageError("--resolution must be positive");
  MapGenParams p;
  p.resolution = o.resolution;
  p.width = static_cast<int>(std::lround(w / o.resolution));
  p.height = static_cast<int>(std::lround(h / o.resolution));
  if (p.width < 3 || p.height < 3) throw UsageError("map must be at least 3x3 cells");
  p.n_walls = o.walls;
  p.n_static = o.statics;
  (void)argv;

  const OccupancyGrid grid = generate_random_map(o.seed, p);
  ensure_parent(o.out);
  save_map(grid, o.out);
  const std::size_t free = grid.free_count();
  fmt::print("map {}: {}x{} cells at {} m ({:.1f}x{:.1f} m)\n", o.out, grid.width(), grid.height(),
             grid.resolution(), grid.width_m(), grid.height_m());
  fmt::print("occupied {} free {} largest free component {}\n", grid.cell_count() - free, free,
             largest_free_component(grid));
  return 0;
}

int cmd_train(const TrainOptions& o, const std::vector<std::string>& argv) {
  TrainSetup setup;
  if (!o.config.empty()) setup = load_train_setup(o.config);
  if (o.workers) setup.train.n_workers = *o.workers;
  if (o.steps) setup.train.total_steps = *o.steps;
  if (o.seed) setup.train.seed = *o.seed;
  setup.train.validate();
  setup.env.validate();

  const fs::path out = o.out;
  const fs::path log_path = o.log.empty() ? fs::path(out.string() + ".log.csv") : fs::path(o.log);
  const fs::path config_path = out.string() + ".config.ini";
  ensure_parent(out);
  ensure_parent(log_path);

  Manifest manifest(out.string() + ".manifest.json", "train", argv);
  manifest["seed"] = setup.train.seed;
  manifest["config"] = format_train_setup(setup);
  manifest.artifact("checkpoint", out);
  manifest.artifact("log", log_path);
  manifest.artifact("config", config_path);
  manifest.write();
  {
    std::ofstream f(config_path);
    f << format_train_setup(setup);
  }

  std::optional<NetworkParams> init;
  if (!o.init.empty()) init = load_params(o.init);

  spdlog::info("training: {} workers, {} steps, seed {}", setup.train.n_workers,
               setup.train.total_steps, setup.train.seed);
  TrainCallbacks cb;
  cb.on_episode = [](const TrainingLogEntry& e, const CurriculumState& c) {
    if ((e.episode + 1) % 500 == 0) {
      spdlog::info("episode {:>7}  t={:>7.1f}s  obstacles {:>2}  success avg {:.2f}", e.episode + 1,
                   e.wall_time_s, c.obstacles(), c.success_average());
    }
  };
  const TrainResult result = a3c_train(setup.train, make_env_factory(setup.env), std::move(init), cb);

  write_training_log(result.log, log_path);
  if (result.aborted) {
    spdlog::error("training aborted: {}", result.error);
    manifest["error"] = result.error;
    manifest.finish(false);
    return 1;
  }
  save_params(result.params, out);
  manifest["total_steps"] = result.total_steps;
  manifest["updates"] = result.updates;
  manifest["episodes"] = result.log.size();
  manifest["converged"] = result.converged;
  manifest.finish(true);
  fmt::print("steps {} updates {} episodes {} obstacles {}\n", result.total_steps, result.updates,
             result.log.size(), result.final_obstacles);
  fmt::print("final success moving average {:.3f}\n", result.final_success_average);
  return 0;
}

namespace {

void print_stats(const std::vector<AggregateStats>& stats) {
  fmt::print("{:<8} {:<14} {:>5} {:>9} {:>9} {:>10} {:>9} {:>9}\n", "planner", "scenario", "runs",
             "time[s]", "path[m]", "collisions", "coll/run", "success%");
  for (const auto& s : stats) {
    fmt::print("{:<8} {:<14} {:>5} {:>9.2f} {:>9.2f} {:>10} {:>9.2f} {:>9.1f}\n", s.planner,
               s.scenario, s.runs, s.mean_time_s, s.mean_path_m, s.total_collisions,
               s.mean_collisions, s.success_pct);
  }
}

void print_relative(const std::vector<RelativeRow>& rows, const std::string& reference) {
  fmt::print("\nrelative to {} (score > 1 is better; * = saturated at {})\n", reference,
             kRelativeCap);
  fmt::print("{:<8} {:>8} {:>8} {:>11} {:>8} {:>10}\n", "planner", "time", "path", "collisions",
             "success", "overall%");
  auto cell = [](const RelativeMetric& m) {
    return fmt::format("{:.3f}{}", m.score, m.saturated ? "*" : "");
  };
  for (const auto& r : rows) {
    fmt::print("{:<8} {:>8} {:>8} {:>11} {:>8} {:>10.1f}\n", r.planner, cell(r.time), cell(r.path),
               cell(r.collisions), cell(r.success), r.overall_pct);
  }
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
  if (!f) throw std::runtime_error("failed writing " + p.string());
}

}  // namespace

int cmd_evaluate(const EvaluateOptions& o, const std::vector<std::string>& argv) {
  Suite suite = o.suite.empty() ? default_suite() : load_suite(o.suite);
  std::vector<std::string> planners = o.planners.empty() ? suite.planners : o.planners;
  if (planners.empty()) throw UsageError("no planners selected");
  for (const auto& p : planners) {
    if (p != "dwa" && p != "arena") throw UsageError("unknown planner '" + p + "'");
  }
  const bool wants_arena = std::find(planners.begin(), planners.end(), "arena") != planners.end();
  if (wants_arena && o.checkpoint.empty()) {
    throw UsageError("the arena planner needs --checkpoint");
  }
  for (auto& s : suite.scenarios) {
    if (o.repeats) s.repeats = *o.repeats;
    if (o.seed) s.seed_base = *o.seed;
  }

  std::shared_ptr<const NetworkParams> params;
  if (wants_arena) params = std::make_shared<const NetworkParams>(load_params(o.checkpoint));
  std::vector<PlannerSpec> specs;
  for (const auto& p : planners) specs.push_back({p, p == "arena" ? params : nullptr});

  const fs::path out = o.out;
  fs::create_directories(out / "maps");
  Manifest manifest(out / "manifest.json", "evaluate", argv);
  manifest["suite"] = o.suite.empty() ? "default" : o.suite;
  manifest["planners"] = planners;
  manifest["checkpoint"] = o.checkpoint;
  if (o.seed) manifest["seed"] = *o.seed;
  const int parallel = o.parallel.value_or(default_parallelism());
  manifest["parallel"] = parallel;
  for (const char* name : {"runs.csv", "stats.csv", "relative.csv", "trajectories.txt"}) {
    manifest.artifact(name, out / name);
  }
  manifest.write();

  int total_runs = 0;
  for (const auto& s : suite.scenarios) total_runs += s.repeats;
  spdlog::info("evaluating {} planner(s) x {} scenario(s), {} runs each planner, {} threads",
               specs.size(), suite.scenarios.size(), total_runs, parallel);
  const SuiteResult result = run_suite(specs, suite.scenarios, suite.episode, parallel);

  export_csv(result.records, out / "runs.csv");
  write_file(out / "stats.csv", format_stats_csv(result.stats));
  save_trajectories(result.records, out / "trajectories.txt", o.trajectory_stride);
  std::string reference = o.reference;
  if (std::find(planners.begin(), planners.end(), reference) == planners.end()) {
    reference = planners.front();
  }
  const auto relative = relative_performance(result.stats, reference);
  write_file(out / "relative.csv", format_relative_csv(relative, reference));

  for (const auto& s : suite.scenarios) {
    const OccupancyGrid grid = s.load_grid();
    save_map(grid, out / "maps" / (s.name + ".map"));
    if (!o.svg) continue;
    std::vector<RunResult> subset;
    for (const auto& r : result.records) {
      if (r.scenario == s.name) subset.push_back(r);
    }
    fs::create_directories(out / "svg");
    SvgOptions so;
    so.start = Vec2{s.start.x, s.start.y};
    so.goal = s.goal;
    export_svg(subset, grid, out / "svg" / (s.name + ".svg"), so);
  }

  int failures = 0;
  for (const auto& r : result.records) {
    if (r.failed) {
      ++failures;
      spdlog::warn("{} {} run {} failed: {}", r.planner, r.scenario, r.run, r.diagnostic);
    }
  }
  print_stats(result.stats);
  print_relative(relative, reference);
  manifest["planner_failures"] = failures;
  manifest.finish(true);
  return 0;
}

int cmd_replay(const ReplayOptions& o) {
  const std::vector<RunResult> all = load_trajectories(o.record);
  if (all.empty()) throw std::runtime_error("record " + o.record + " holds no runs");
  std::string scenario = o.scenario;
  if (scenario.empty()) {
    scenario = all.front().scenario;
    for (const auto& r : all) {
      if (r.scenario != scenario) throw UsageError("record holds several scenarios; pass --scenario");
    }
  }
  std::vector<RunResult> chosen;
  for (const auto& r : all) {
    if (r.scenario != scenario) continue;
    if (!o.planners.empty() &&
        std::find(o.planners.begin(), o.planners.end(), r.planner) == o.planners.end()) {
      continue;
    }
    if (o.run && r.run != *o.run) continue;
    chosen.push_back(r);
  }
  if (chosen.empty()) {
    if (o.run) throw UsageError(fmt::format("no run {} in scenario '{}'", *o.run, scenario));
    throw UsageError("no runs match scenario '" + scenario + "'");
  }
  const fs::path map_path =
      o.map.empty() ? fs::path(o.record).parent_path() / "maps" / (scenario + ".map") : fs::path(o.map);
  const OccupancyGrid grid = load_map(map_path);
  ensure_parent(o.out);
  SvgOptions so;
  so.start = chosen.front().trajectory.front();
  export_svg(chosen, grid, o.out, so);
  fmt::print("rendered {} trajectories of '{}' to {}\n", chosen.size(), scenario, o.out);
  return 0;
}

int cmd_inspect(const InspectOptions& o) {
  if (o.checkpoint.empty() && o.map.empty() && o.runs.empty()) {
    throw UsageError("inspect needs --checkpoint, --map or --runs");
  }
  if (!o.checkpoint.empty()) {
    const NetworkParams p = load_params(o.checkpoint);
    const auto& s = p.shape();
    fmt::print("checkpoint {}: input {} hidden {}/{} gru {} actions {}\n", o.checkpoint, s.input,
               s.hidden1, s.hidden2, s.gru, s.actions);
    for (std::size_t i = 0; i < kTensorCount; ++i) {
      const auto t = static_cast<Tensor>(i);
      const auto m = p.tensor(t);
      fmt::print("  {:<14} {:>4} x {:<4} |w| = {:.6g}\n", tensor_name(t), m.rows(), m.cols(), m.norm());
    }
    fmt::print("  parameters {}  norm {:.6g}\n", p.size(), std::sqrt(p.squared_norm()));
  }
  if (!o.map.empty()) {
    const OccupancyGrid g = load_map(o.map);
    const std::size_t free = g.free_count();
    fmt::print("map {}: {}x{} cells at {} m, occupied {} free {} largest free component {}\n", o.map,
               g.width(), g.height(), g.resolution(), g.cell_count() - free, free,
               largest_free_component(g));
  }
  if (!o.runs.empty()) {
    const auto records = load_runs_csv(o.runs);
    print_stats(aggregate(records));
  }
  return 0;
}

}  // namespace navarena::cli
