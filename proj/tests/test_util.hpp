#pragma once

#include <cmath>
#include <filesystem>
#include <string>

#include "navarena/grid.hpp"
#include "navarena/random.hpp"

namespace navarena::testutil {

/// Grid with each interior cell occupied independently with probability p.
inline OccupancyGrid random_grid(int w, int h, double res, double p, Rng& rng) {
  OccupancyGrid g(w, h, res);
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      if (uniform(rng, 0.0, 1.0) < p) g.set_occupied(x, y, true);
    }
  }
  return g;
}

/// Fresh per-test scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("navarena_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline double rel_error(double a, double b) {
  return std::abs(a - b) / std::max(1e-8, std::abs(a) + std::abs(b));
}

}  // namespace navarena::testutil
