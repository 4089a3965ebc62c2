#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "navarena/a3c.hpp"
#include "navarena/benchmark.hpp"
#include "navarena/config.hpp"

namespace py = pybind11;
using namespace navarena;

namespace {

py::dict run_to_dict(const RunResult& r) {
  py::dict d;
  d["planner"] = r.planner;
  d["scenario"] = r.scenario;
  d["run"] = r.run;
  d["time_s"] = r.time_to_goal;
  d["path_m"] = r.path_length;
  d["collisions"] = r.collisions;
  d["reached_goal"] = r.reached_goal;
  d["success"] = r.success;
  d["timeout"] = r.timeout;
  d["failed"] = r.failed;
  d["replans"] = r.replans;
  d["diagnostic"] = r.diagnostic;
  py::list traj;
  for (const auto& p : r.trajectory) traj.append(py::make_tuple(p.x, p.y));
  d["trajectory"] = traj;
  return d;
}

py::dict stats_to_dict(const AggregateStats& s) {
  py::dict d;
  d["planner"] = s.planner;
  d["scenario"] = s.scenario;
  d["runs"] = s.runs;
  d["mean_time_s"] = s.mean_time_s;
  d["mean_path_m"] = s.mean_path_m;
  d["total_collisions"] = s.total_collisions;
  d["mean_collisions"] = s.mean_collisions;
  d["success_pct"] = s.success_pct;
  d["timeouts"] = s.timeouts;
  d["failures"] = s.failures;
  return d;
}

std::vector<PlannerSpec> planner_specs(const std::vector<std::string>& names,
                                       const std::optional<NetworkParams>& params) {
  std::shared_ptr<const NetworkParams> shared;
  if (params) shared = std::make_shared<const NetworkParams>(*params);
  std::vector<PlannerSpec> out;
  for (const auto& n : names) out.push_back({n, n == "arena" ? shared : nullptr});
  return out;
}

}  // namespace

PYBIND11_MODULE(_navarena, m) {
  m.doc() = "Hierarchical navigation simulator, planners, A3C trainer and benchmark";

  py::register_exception<NoPathError>(m, "NoPathError", PyExc_RuntimeError);
  py::register_exception<InvalidEndpointError>(m, "InvalidEndpointError", PyExc_RuntimeError);
  py::register_exception<MapFormatError>(m, "MapFormatError", PyExc_ValueError);
  py::register_exception<CheckpointError>(m, "CheckpointError", PyExc_ValueError);
  py::register_exception<SuiteFormatError>(m, "SuiteFormatError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<Vec2>(m, "Vec2")
      .def(py::init<>())
      .def(py::init([](double x, double y) { return Vec2{x, y}; }))
      .def(py::init([](const std::pair<double, double>& t) { return Vec2{t.first, t.second}; }))
      .def_readwrite("x", &Vec2::x)
      .def_readwrite("y", &Vec2::y)
      .def("__iter__", [](const Vec2& v) { return py::iter(py::make_tuple(v.x, v.y)); })
      .def("__eq__", [](const Vec2& a, const Vec2& b) { return a == b; })
      .def("__repr__", [](const Vec2& v) { return "Vec2(" + std::to_string(v.x) + ", " + std::to_string(v.y) + ")"; });
  py::implicitly_convertible<py::tuple, Vec2>();

  py::class_<Action>(m, "Action")
      .def(py::init([](double v, double omega) { return Action{v, omega}; }), py::arg("v") = 0.0,
           py::arg("omega") = 0.0)
      .def_readwrite("v", &Action::v)
      .def_readwrite("omega", &Action::omega);

  py::class_<RobotState>(m, "RobotState")
      .def(py::init([](double x, double y, double theta, double v, double omega) {
             RobotState r;
             r.x = x;
             r.y = y;
             r.theta = theta;
             r.v = v;
             r.omega = omega;
             return r;
           }),
           py::arg("x") = 0.0, py::arg("y") = 0.0, py::arg("theta") = 0.0, py::arg("v") = 0.0,
           py::arg("omega") = 0.0)
      .def_readwrite("x", &RobotState::x)
      .def_readwrite("y", &RobotState::y)
      .def_readwrite("theta", &RobotState::theta)
      .def_readwrite("v", &RobotState::v)
      .def_readwrite("omega", &RobotState::omega);

  // Maps.
  py::class_<OccupancyGrid>(m, "OccupancyGrid")
      .def(py::init<int, int, double>(), py::arg("width"), py::arg("height"), py::arg("resolution"))
      .def_property_readonly("width", &OccupancyGrid::width)
      .def_property_readonly("height", &OccupancyGrid::height)
      .def_property_readonly("resolution", &OccupancyGrid::resolution)
      .def("occupied", py::overload_cast<int, int>(&OccupancyGrid::occupied, py::const_))
      .def("set_occupied", &OccupancyGrid::set_occupied)
      .def("world_to_cell",
           [](const OccupancyGrid& g, const Vec2& p) {
             const CellIndex c = g.world_to_cell(p);
             return py::make_tuple(c.x, c.y);
           })
      .def("to_array",
           [](const OccupancyGrid& g) {
             py::array_t<std::uint8_t> a({g.height(), g.width()});
             std::copy(g.cells().begin(), g.cells().end(), a.mutable_data());
             return a;
           },
           "Cells as a (height, width) uint8 array, row 0 at y = 0.");

  m.def("generate_random_map",
        [](std::uint64_t seed, int width, int height, double resolution, int walls, int statics) {
          MapGenParams p;
          p.width = width;
          p.height = height;
          p.resolution = resolution;
          p.n_walls = walls;
          p.n_static = statics;
          return generate_random_map(seed, p);
        },
        py::arg("seed"), py::arg("width") = 100, py::arg("height") = 100, py::arg("resolution") = 0.1,
        py::arg("walls") = 0, py::arg("statics") = 0);
  m.def("load_map", &load_map);
  m.def("save_map", &save_map);
  m.def("parse_map", &parse_map);
  m.def("format_map", &format_map);

  // Global planning.
  py::class_<PlannerGrid>(m, "PlannerGrid")
      .def("blocked", py::overload_cast<int, int>(&PlannerGrid::blocked, py::const_))
      .def_property_readonly("inflation_radius", &PlannerGrid::inflation_radius);
  m.def("inflate", &inflate, py::arg("grid"), py::arg("radius"));

  py::class_<GlobalPath>(m, "GlobalPath")
      .def_static("from_poses", &GlobalPath::from_poses)
      .def_readonly("poses", &GlobalPath::poses)
      .def_readonly("total_length", &GlobalPath::total_length)
      .def_readonly("grid_cost", &GlobalPath::grid_cost);
  m.def("plan_astar", &plan_astar, py::arg("pgrid"), py::arg("start"), py::arg("goal"));
  m.def("plan_from", &plan_from, py::arg("pgrid"), py::arg("start"), py::arg("goal"));
  m.def("distance_to_path", &distance_to_path);

  // Subgoal selection.
  m.def("compute_subgoal",
        [](const GlobalPath& path, const Vec2& robot, double d_ahead) {
          const SubgoalResult r = compute_subgoal(path, robot, d_ahead);
          const char* kind = r.kind == SubgoalResult::Kind::kIntersection ? "intersection"
                             : r.kind == SubgoalResult::Kind::kGoalInside  ? "goal_inside"
                                                                           : "needs_replan";
          return py::make_tuple(kind, r.point, r.arclength);
        },
        py::arg("path"), py::arg("robot"), py::arg("d_ahead") = 1.55,
        "Returns (kind, point, arclength).");

  // Sensing and local planning.
  py::class_<ObstacleState>(m, "ObstacleState")
      .def(py::init([](const Vec2& p, const Vec2& v, double r) {
             ObstacleState o;
             o.position = p;
             o.velocity = v;
             o.radius = r;
             return o;
           }),
           py::arg("position"), py::arg("velocity") = Vec2{}, py::arg("radius") = 0.3)
      .def_readwrite("position", &ObstacleState::position)
      .def_readwrite("velocity", &ObstacleState::velocity)
      .def_readwrite("radius", &ObstacleState::radius);

  py::class_<LidarScan>(m, "LidarScan")
      .def_readonly("angle_min", &LidarScan::angle_min)
      .def_readonly("angle_increment", &LidarScan::angle_increment)
      .def_readonly("range_max", &LidarScan::range_max)
      .def_property_readonly("ranges", [](const LidarScan& s) {
        return py::array_t<double>(static_cast<py::ssize_t>(s.ranges.size()), s.ranges.data());
      });
  m.def("raycast",
        [](const OccupancyGrid& g, const RobotState& r, const std::vector<ObstacleState>& obs,
           int n_beams, double range_max) { return raycast(g, obs, r, n_beams, range_max); },
        py::arg("grid"), py::arg("robot"), py::arg("obstacles") = std::vector<ObstacleState>{},
        py::arg("n_beams") = 360, py::arg("range_max") = 3.5);

  py::class_<DwaParams>(m, "DwaParams")
      .def(py::init<>())
      .def_readwrite("n_v", &DwaParams::n_v)
      .def_readwrite("n_omega", &DwaParams::n_omega)
      .def_readwrite("t_sim", &DwaParams::t_sim)
      .def_readwrite("heading_weight", &DwaParams::heading_weight)
      .def_readwrite("clearance_weight", &DwaParams::clearance_weight)
      .def_readwrite("velocity_weight", &DwaParams::velocity_weight)
      .def_readwrite("v_max", &DwaParams::v_max)
      .def_readwrite("omega_max", &DwaParams::omega_max);
  m.def("dwa_plan",
        [](const LidarScan& scan, const RobotState& r, const Vec2& subgoal, const DwaParams& p) {
          const DwaDecision d = dwa_plan(scan, r, subgoal, p);
          return py::make_tuple(d.action, d.fallback, d.score);
        },
        py::arg("scan"), py::arg("robot"), py::arg("subgoal"), py::arg("params") = DwaParams{},
        "Returns (action, fallback, score).");

  // Reward.
  py::class_<StepSnapshot>(m, "StepSnapshot")
      .def(py::init([](double goal_distance, double min_clearance, double displacement, bool collision,
                       bool goal_reached) {
             return StepSnapshot{goal_distance, min_clearance, displacement, collision, goal_reached};
           }),
           py::arg("goal_distance"), py::arg("min_clearance"), py::arg("displacement") = 0.0,
           py::arg("collision") = false, py::arg("goal_reached") = false);
  m.def("compute_reward",
        [](const StepSnapshot& prev, const StepSnapshot& curr) {
          const RewardBreakdown r = compute_reward(prev, curr, RewardParams{});
          py::dict d;
          d["success"] = r.r_s;
          d["collision"] = r.r_c;
          d["danger"] = r.r_d;
          d["progress"] = r.r_p;
          d["no_move"] = r.r_m;
          d["total"] = r.total;
          return d;
        });

  // Policy parameters and training.
  py::class_<NetworkParams>(m, "NetworkParams")
      .def_static("random", [](std::uint64_t seed) { return NetworkParams::random(NetworkShape{}, seed); })
      .def_property_readonly("size", &NetworkParams::size)
      .def("to_array",
           [](const NetworkParams& p) {
             return py::array_t<double>(static_cast<py::ssize_t>(p.size()), p.data().data());
           })
      .def("__eq__", [](const NetworkParams& a, const NetworkParams& b) { return a == b; });
  m.def("load_params", &load_params);
  m.def("save_params", &save_params);

  m.def("train",
        [](std::int64_t steps, int workers, std::uint64_t seed, const std::string& config,
           std::optional<int> max_obstacles, bool trivial) {
          TrainSetup setup;
          if (!config.empty()) setup = load_train_setup(config);
          setup.train.total_steps = steps;
          setup.train.n_workers = workers;
          setup.train.seed = seed;
          if (max_obstacles) setup.train.curriculum.max_obstacles = *max_obstacles;
          if (trivial) setup.env.trivial = true;
          TrainResult r;
          {
            py::gil_scoped_release release;
            r = a3c_train(setup.train, make_env_factory(setup.env));
          }
          if (r.aborted) throw std::runtime_error("training aborted: " + r.error);
          py::list log;
          for (const auto& e : r.log) {
            log.append(py::make_tuple(e.episode, e.steps, e.total_reward, e.success, e.obstacle_count));
          }
          return py::make_tuple(r.params, log);
        },
        py::arg("steps"), py::arg("workers") = 1, py::arg("seed") = 1, py::arg("config") = "",
        py::arg("max_obstacles") = py::none(), py::arg("trivial") = false,
        "Runs A3C and returns (params, log) with log rows "
        "(episode, steps, total_reward, success, obstacle_count).");

  // Benchmark.
  py::class_<Scenario>(m, "Scenario")
      .def_readwrite("name", &Scenario::name)
      .def_readwrite("n_obstacles", &Scenario::n_obstacles)
      .def_readwrite("v_obs", &Scenario::v_obs)
      .def_readwrite("repeats", &Scenario::repeats)
      .def_readwrite("seed_base", &Scenario::seed_base);
  py::class_<Suite>(m, "Suite")
      .def_readonly("name", &Suite::name)
      .def_readonly("planners", &Suite::planners)
      .def_readwrite("scenarios", &Suite::scenarios);
  m.def("default_suite", &default_suite, py::arg("repeats") = 100);
  m.def("load_suite", &load_suite);
  m.def("parse_suite", &parse_suite, py::arg("text"), py::arg("base_dir") = std::filesystem::path{});

  m.def("run_suite",
        [](const Suite& suite, const std::vector<std::string>& planners,
           const std::optional<NetworkParams>& params, int parallelism) {
          const auto names = planners.empty() ? suite.planners : planners;
          SuiteResult res;
          {
            py::gil_scoped_release release;
            res = run_suite(planner_specs(names, params), suite.scenarios, suite.episode, parallelism);
          }
          py::list runs, stats;
          for (const auto& r : res.records) runs.append(run_to_dict(r));
          for (const auto& s : res.stats) stats.append(stats_to_dict(s));
          return py::make_tuple(runs, stats);
        },
        py::arg("suite"), py::arg("planners") = std::vector<std::string>{},
        py::arg("params") = py::none(), py::arg("parallelism") = 1,
        "Runs every (planner, scenario, run); returns (runs, stats) as lists of dicts.");
}
