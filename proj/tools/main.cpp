#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/cfg/helpers.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("navarena");
  logger->set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  // NAV_ARENA_LOG takes spdlog level syntax, e.g. "debug" or "warn".
  if (const char* env = std::getenv("NAV_ARENA_LOG")) spdlog::cfg::helpers::load_levels(env);
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  const std::vector<std::string> args(argv, argv + argc);
  namespace cli = navarena::cli;

  CLI::App app{"Hierarchical navigation simulator, trainer and benchmark"};
  app.set_version_flag("--version", std::string(NAVARENA_VERSION));
  app.require_subcommand(1, 1);

  cli::GenMapOptions gm;
  auto* gen = app.add_subcommand("gen-map", "Generate a random occupancy-grid map");
  gen->add_option("--seed", gm.seed, "Root seed");
  gen->add_option("--size", gm.size, "Map size in meters, WxH")->capture_default_str();
  gen->add_option("--resolution", gm.resolution, "Cell size in meters")->capture_default_str();
  gen->add_option("--walls", gm.walls, "Number of wall segments")->check(CLI::NonNegativeNumber);
  gen->add_option("--static", gm.statics, "Number of static blocks")->check(CLI::NonNegativeNumber);
  gen->add_option("--out", gm.out, "Output map file")->required();

  cli::TrainOptions tr;
  auto* train = app.add_subcommand("train", "Train the actor-critic policy with A3C");
  train->add_option("--config", tr.config, "Training config (INI)");
  train->add_option("--out", tr.out, "Checkpoint path")->capture_default_str();
  train->add_option("--log", tr.log, "Training log CSV (default: <out>.log.csv)");
  train->add_option("--init", tr.init, "Start from this checkpoint");
  train->add_option("--workers", tr.workers, "Worker count (overrides config)")
      ->check(CLI::PositiveNumber);
  train->add_option("--steps", tr.steps, "Environment step budget (overrides config)")
      ->check(CLI::NonNegativeNumber);
  train->add_option("--seed", tr.seed, "Root seed (overrides config)");

  cli::EvaluateOptions ev;
  auto* eval = app.add_subcommand("evaluate", "Run a benchmark suite");
  eval->add_option("--suite", ev.suite, "Suite file (default: built-in 3x3 matrix)");
  eval->add_option("--planners", ev.planners, "Planners to run (dwa, arena)")->delimiter(',');
  eval->add_option("--checkpoint", ev.checkpoint, "Policy checkpoint for the arena planner");
  eval->add_option("--out", ev.out, "Output directory")->capture_default_str();
  eval->add_option("--parallel", ev.parallel, "Worker threads (default: all processors)")
      ->check(CLI::PositiveNumber);
  eval->add_option("--repeats", ev.repeats, "Override runs per scenario")->check(CLI::PositiveNumber);
  eval->add_option("--seed", ev.seed, "Override every scenario's seed base");
  eval->add_option("--reference", ev.reference, "Reference planner for relative scores")
      ->capture_default_str();
  eval->add_option("--trajectory-stride", ev.trajectory_stride, "Keep every k-th pose")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  eval->add_flag("!--no-svg", ev.svg, "Skip SVG rendering");

  cli::ReplayOptions rp;
  auto* replay = app.add_subcommand("replay", "Render stored trajectories to SVG");
  replay->add_option("--record", rp.record, "trajectories.txt written by evaluate")->required();
  replay->add_option("--map", rp.map, "Map file (default: maps/<scenario>.map beside the record)");
  replay->add_option("--out", rp.out, "Output SVG")->capture_default_str();
  replay->add_option("--scenario", rp.scenario, "Scenario to render");
  replay->add_option("--planners", rp.planners, "Restrict to these planners")->delimiter(',');
  replay->add_option("--run", rp.run, "Single run index");

  cli::InspectOptions in;
  auto* inspect = app.add_subcommand("inspect", "Print information about an artifact");
  inspect->add_option("--checkpoint", in.checkpoint, "Policy checkpoint");
  inspect->add_option("--map", in.map, "Map file");
  inspect->add_option("--runs", in.runs, "Per-run CSV from evaluate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*gen) return cli::cmd_gen_map(gm, args);
    if (*train) return cli::cmd_train(tr, args);
    if (*eval) return cli::cmd_evaluate(ev, args);
    if (*replay) return cli::cmd_replay(rp);
    if (*inspect) return cli::cmd_inspect(in);
  } catch (const cli::UsageError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 1;
}
