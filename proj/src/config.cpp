#include "navarena/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <fmt/format.h>

#include "ini_section.hpp"

namespace navarena {

namespace pt = boost::property_tree;

namespace {

using Section = IniSection<ConfigError>;

// One table drives both parsing and formatting so the two cannot drift.
template <typename Visitor>
void visit_setup(TrainSetup& s, Visitor&& v) {
  TrainConfig& t = s.train;
  v("train", "gamma", t.gamma);
  v("train", "learning_rate", t.learning_rate);
  v("train", "adam_epsilon", t.adam_epsilon);
  v("train", "adam_beta1", t.adam_beta1);
  v("train", "adam_beta2", t.adam_beta2);
  v("train", "workers", t.n_workers);
  v("train", "rollout_length", t.rollout_length);
  v("train", "batch_size", t.batch_size);
  v("train", "max_episode_steps", t.max_episode_steps);
  v("train", "use_gae", t.use_gae);
  v("train", "gae_lambda", t.gae_lambda);
  v("train", "clip_value_loss", t.clip_value_loss);
  v("train", "value_clip_range", t.value_clip_range);
  v("train", "max_gradient_norm", t.max_gradient_norm);
  v("train", "entropy_beta", t.entropy_beta);
  v("train", "value_coef", t.value_coef);
  v("train", "mean_success_bound", t.mean_success_bound);
  v("train", "epsilon_end", t.epsilon_end);
  v("train", "epsilon_max_steps", t.epsilon_max_steps);
  v("train", "total_steps", t.total_steps);
  v("train", "max_wall_seconds", t.max_wall_seconds);
  v("train", "seed", t.seed);

  CurriculumParams& c = t.curriculum;
  v("curriculum", "initial_obstacles", c.initial_obstacles);
  v("curriculum", "max_obstacles", c.max_obstacles);
  v("curriculum", "step", c.step);
  v("curriculum", "window", c.window);
  v("curriculum", "up_threshold", c.up_threshold);
  v("curriculum", "down_threshold", c.down_threshold);

  RewardParams& r = t.reward;
  v("reward", "success", r.success);
  v("reward", "collision", r.collision);
  v("reward", "danger", r.danger);
  v("reward", "no_move", r.no_move);
  v("reward", "w_p", r.w_p);
  v("reward", "w_n", r.w_n);
  v("reward", "d_safe", r.d_safe);

  NetworkShape& n = t.network;
  v("network", "hidden1", n.hidden1);
  v("network", "hidden2", n.hidden2);
  v("network", "gru", n.gru);

  EnvConfig& e = s.env;
  v("env", "map_width", e.map.width);
  v("env", "map_height", e.map.height);
  v("env", "map_resolution", e.map.resolution);
  v("env", "max_walls", e.max_walls);
  v("env", "max_static", e.max_static);
  v("env", "goal_min_distance", e.goal_min_distance);
  v("env", "goal_max_distance", e.goal_max_distance);
  v("env", "max_detour", e.max_detour);
  v("env", "v_obs_min", e.v_obs_min);
  v("env", "v_obs_max", e.v_obs_max);
  v("env", "obstacle_radius", e.obstacle_radius);
  v("env", "start_keep_out", e.start_keep_out);
  v("env", "goal_keep_out", e.goal_keep_out);
  v("env", "trivial", e.trivial);
  v("env", "trivial_goal_distance", e.trivial_goal_distance);
  v("env", "dt", e.world.dt);
  v("env", "lidar_beams", e.world.n_beams_raw);
  v("env", "range_max", e.world.range_max);
  v("env", "d_goal", e.world.d_goal);
  v("env", "robot_radius", e.world.robot_radius);
  v("env", "lidar_noise_std", e.world.lidar_noise_std);
}

void sync(TrainSetup& s) {
  s.env.max_episode_steps = s.train.max_episode_steps;
  s.env.reward = s.train.reward;
}

}  // namespace

TrainSetup parse_train_setup(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  static const std::set<std::string> kSections = {"train", "curriculum", "reward", "network", "env"};
  for (const auto& [name, child] : tree) {
    if (!kSections.count(name)) throw ConfigError("unknown config section [" + name + "]");
    if (child.empty() && !child.data().empty()) throw ConfigError("key outside a section: " + name);
  }
  TrainSetup setup;
  std::map<std::string, Section> sections;
  for (const auto& name : kSections) {
    const auto child = tree.get_child_optional(name);
    static const pt::ptree kEmpty;
    sections.emplace(name, Section(name, child ? *child : kEmpty));
  }
  visit_setup(setup, [&](const char* section, const char* key, auto& value) {
    sections.at(section).get(key, value);
  });
  for (const auto& [_, s] : sections) s.reject_unknown();
  sync(setup);
  try {
    setup.train.validate();
    setup.env.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return setup;
}

TrainSetup load_train_setup(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_train_setup(ss.str());
}

std::string format_train_setup(const TrainSetup& setup) {
  TrainSetup copy = setup;
  std::string out;
  std::string current;
  visit_setup(copy, [&](const char* section, const char* key, auto& value) {
    if (current != section) {
      if (!current.empty()) out += '\n';
      out += fmt::format("[{}]\n", section);
      current = section;
    }
    using T = std::decay_t<decltype(value)>;
    if constexpr (std::is_same_v<T, bool>) {
      out += fmt::format("{} = {}\n", key, value ? "true" : "false");
    } else {
      out += fmt::format("{} = {}\n", key, value);
    }
  });
  return out;
}

}  // namespace navarena
