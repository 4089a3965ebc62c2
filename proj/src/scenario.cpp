#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <fmt/format.h>

#include "ini_section.hpp"
#include "navarena/benchmark.hpp"

namespace navarena {

namespace pt = boost::property_tree;

namespace {

using Section = IniSection<SuiteFormatError>;

void read_episode(Section& s, EpisodeParams& ep) {
  s.get("timeout_s", ep.timeout_s);
  s.get("dt", ep.world.dt);
  s.get("d_goal", ep.world.d_goal);
  s.get("robot_radius", ep.world.robot_radius);
  s.get("lidar_beams", ep.world.n_beams_raw);
  s.get("range_max", ep.world.range_max);
  s.get("lidar_noise_std", ep.world.lidar_noise_std);
  s.get("d_ahead", ep.horizon.d_ahead);
  s.get("t_lim", ep.horizon.t_lim);
  s.get("d_off", ep.horizon.d_off);
  s.get("inflation_radius", ep.inflation_radius);
  s.get("greedy_policy", ep.greedy_policy);
  s.get("dwa_heading_weight", ep.dwa.heading_weight);
  s.get("dwa_clearance_weight", ep.dwa.clearance_weight);
  s.get("dwa_velocity_weight", ep.dwa.velocity_weight);
  s.get("dwa_t_sim", ep.dwa.t_sim);
  s.get("dwa_v_samples", ep.dwa.n_v);
  s.get("dwa_omega_samples", ep.dwa.n_omega);
  s.reject_unknown();
  ep.dwa.v_max = ep.world.v_max;
  ep.dwa.omega_max = ep.world.omega_max;
  ep.dwa.robot_radius = ep.world.robot_radius;
}

Scenario read_scenario(const std::string& name, Section& s, const std::filesystem::path& base_dir) {
  Scenario sc;
  sc.name = name;
  if (const auto f = s.text("map_file")) {
    sc.map_file = std::filesystem::path(*f);
    if (sc.map_file.is_relative() && !base_dir.empty()) sc.map_file = base_dir / sc.map_file;
  }
  s.get("map_width", sc.map_gen.width);
  s.get("map_height", sc.map_gen.height);
  s.get("map_resolution", sc.map_gen.resolution);
  s.get("map_walls", sc.map_gen.n_walls);
  s.get("map_static", sc.map_gen.n_static);
  s.get("map_seed", sc.map_seed);
  s.get("obstacles", sc.n_obstacles);
  s.get("v_obs", sc.v_obs);
  if (const auto m = s.text("motion")) {
    try {
      sc.model = parse_motion_model(*m);
    } catch (const std::exception& e) {
      throw SuiteFormatError(fmt::format("[scenario {}] {}", name, e.what()));
    }
  }
  if (const auto a = s.numbers("heading_axis", 1)) sc.heading_axis = (*a)[0];
  if (const auto r = s.numbers("spawn_region", 4)) {
    sc.spawn_region = std::make_pair(Vec2{(*r)[0], (*r)[1]}, Vec2{(*r)[2], (*r)[3]});
  }
  s.get("start_keep_out", sc.start_keep_out);
  s.get("goal_keep_out", sc.goal_keep_out);
  const auto start = s.numbers("start", 3);
  const auto goal = s.numbers("goal", 2);
  if (!start || !goal) throw SuiteFormatError(fmt::format("[scenario {}] needs start and goal", name));
  sc.start = {(*start)[0], (*start)[1], (*start)[2]};
  sc.goal = {(*goal)[0], (*goal)[1]};
  s.get("repeats", sc.repeats);
  s.get("seed_base", sc.seed_base);
  s.reject_unknown();
  try {
    sc.validate();
  } catch (const std::invalid_argument& e) {
    throw SuiteFormatError(e.what());
  }
  return sc;
}

}  // namespace

Suite parse_suite(const std::string& text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw SuiteFormatError(std::string("suite file: ") + e.what());
  }
  Suite suite;
  bool have_suite = false;
  int default_repeats = 1;
  std::uint64_t default_seed = 0;
  // Defaults from [suite] apply to scenarios that do not override them, so
  // read it first.
  for (const auto& [name, child] : tree) {
    if (name != "suite") continue;
    have_suite = true;
    Section s("suite", child);
    s.get("name", suite.name);
    std::string planners;
    s.get("planners", planners);
    for (char& c : planners) {
      if (c == ',') c = ' ';
    }
    std::istringstream in(planners);
    for (std::string p; in >> p;) suite.planners.push_back(p);
    s.get("repeats", default_repeats);
    s.get("seed_base", default_seed);
    s.reject_unknown();
  }
  if (!have_suite) throw SuiteFormatError("suite file lacks a [suite] section");

  for (const auto& [name, child] : tree) {
    if (name == "suite") continue;
    if (name == "episode") {
      Section s("episode", child);
      read_episode(s, suite.episode);
      continue;
    }
    constexpr std::string_view kPrefix = "scenario ";
    if (name.rfind(kPrefix, 0) != 0) throw SuiteFormatError("unknown section [" + name + "]");
    const std::string sname = name.substr(kPrefix.size());
    pt::ptree with_defaults = child;
    if (!with_defaults.get_child_optional("repeats")) {
      with_defaults.put("repeats", default_repeats);
    }
    if (!with_defaults.get_child_optional("seed_base")) {
      with_defaults.put("seed_base", default_seed);
    }
    Section s("scenario " + sname, with_defaults);
    suite.scenarios.push_back(read_scenario(sname, s, base_dir));
  }
  if (suite.scenarios.empty()) throw SuiteFormatError("suite defines no scenarios");
  try {
    suite.episode.validate();
  } catch (const std::invalid_argument& e) {
    throw SuiteFormatError(std::string("[episode] ") + e.what());
  }
  return suite;
}

Suite load_suite(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw SuiteFormatError("cannot open suite file " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_suite(ss.str(), path.parent_path());
}

Suite default_suite(int repeats) {
  Suite suite;
  suite.name = "default";
  suite.planners = {"dwa", "arena"};
  suite.episode.dwa.v_max = suite.episode.world.v_max;
  suite.episode.dwa.omega_max = suite.episode.world.omega_max;
  for (int n : {5, 10, 20}) {
    for (double v : {0.1, 0.2, 0.3}) {
      Scenario sc;
      sc.name = fmt::format("obs{:02d}_v{}", n, v);
      sc.map_gen.width = 120;
      sc.map_gen.height = 120;
      sc.map_gen.resolution = 0.1;
      sc.n_obstacles = n;
      sc.v_obs = v;
      if (n == 5) {
        sc.model = MotionModel::kRandomWalk;
      } else {
        sc.model = MotionModel::kLinearBounce;
        sc.heading_axis = 0.0;
      }
      sc.spawn_region = std::make_pair(Vec2{0.5, 3.0}, Vec2{11.5, 9.0});
      sc.start = {6.0, 1.5, std::numbers::pi / 2.0};
      sc.goal = {6.0, 10.5};
      sc.repeats = repeats;
      sc.seed_base = 1000;
      suite.scenarios.push_back(sc);
    }
  }
  return suite;
}

}  // namespace navarena
