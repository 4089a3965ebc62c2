#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "navarena/env.hpp"
#include "navarena/training.hpp"

namespace navarena {

/// Everything a training run needs.
struct TrainSetup {
  TrainConfig train;
  EnvConfig env;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// INI with optional sections [train], [curriculum], [reward], [network] and
/// [env]. Keys not present keep their defaults; unknown keys are errors.
TrainSetup parse_train_setup(const std::string& text);
TrainSetup load_train_setup(const std::filesystem::path& path);
/// Writes every key, so the output reproduces the setup when parsed.
std::string format_train_setup(const TrainSetup& setup);

}  // namespace navarena
