#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace navarena::cli {

/// Raised for invalid flag combinations; main() maps it to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GenMapOptions {
  std::uint64_t seed = 0;
  std::string size = "10x10";  // meters
  double resolution = 0.1;
  int walls = 0;
  int statics = 0;
  std::string out;
};

struct TrainOptions {
  std::string config;
  std::string out = "policy.ckpt";
  std::string log;
  std::string init;
  std::optional<int> workers;
  std::optional<std::int64_t> steps;
  std::optional<std::uint64_t> seed;
};

struct EvaluateOptions {
  std::string suite;  // empty: built-in default matrix
  std::vector<std::string> planners;
  std::string checkpoint;
  std::string out = "eval";
  std::optional<int> parallel;
  std::optional<int> repeats;
  std::optional<std::uint64_t> seed;
  std::string reference = "arena";
  int trajectory_stride = 2;
  bool svg = true;
};

struct ReplayOptions {
  std::string record;
  std::string map;
  std::string out = "replay.svg";
  std::string scenario;
  std::vector<std::string> planners;
  std::optional<int> run;
};

struct InspectOptions {
  std::string checkpoint;
  std::string map;
  std::string runs;
};

int cmd_gen_map(const GenMapOptions& o, const std::vector<std::string>& argv);
int cmd_train(const TrainOptions& o, const std::vector<std::string>& argv);
int cmd_evaluate(const EvaluateOptions& o, const std::vector<std::string>& argv);
int cmd_replay(const ReplayOptions& o);
int cmd_inspect(const InspectOptions& o);

int default_parallelism();

}  // namespace navarena::cli
