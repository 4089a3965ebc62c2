#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "navarena/geometry.hpp"

namespace navarena {

struct CellIndex {
  int x = 0;
  int y = 0;
  constexpr bool operator==(const CellIndex&) const = default;
};

/// Binary occupancy grid with its origin at (0, 0). Cell (cx, cy) covers
/// [cx*res, (cx+1)*res) x [cy*res, (cy+1)*res). The outermost ring of cells is
/// always occupied so the world is bounded.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(int width, int height, double resolution);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  double width_m() const { return width_ * resolution_; }
  double height_m() const { return height_ * resolution_; }
  std::size_t cell_count() const { return cells_.size(); }

  bool in_bounds(int cx, int cy) const {
    return cx >= 0 && cy >= 0 && cx < width_ && cy < height_;
  }
  std::size_t index(int cx, int cy) const {
    return static_cast<std::size_t>(cy) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(cx);
  }
  /// Cells outside the grid read as occupied.
  bool occupied(int cx, int cy) const {
    return !in_bounds(cx, cy) || cells_[index(cx, cy)] != 0;
  }
  bool occupied(CellIndex c) const { return occupied(c.x, c.y); }
  /// Border cells cannot be cleared.
  void set_occupied(int cx, int cy, bool value);

  CellIndex world_to_cell(const Vec2& p) const;
  Vec2 cell_center(int cx, int cy) const {
    return {(cx + 0.5) * resolution_, (cy + 0.5) * resolution_};
  }
  Vec2 cell_center(CellIndex c) const { return cell_center(c.x, c.y); }
  bool is_border(int cx, int cy) const {
    return cx == 0 || cy == 0 || cx == width_ - 1 || cy == height_ - 1;
  }

  /// True if the open disc (center, radius) intersects any occupied cell.
  bool disc_overlaps(const Vec2& center, double radius) const;

  std::span<const std::uint8_t> cells() const { return cells_; }
  std::size_t free_count() const;

  bool operator==(const OccupancyGrid&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  double resolution_ = 0.0;
  std::vector<std::uint8_t> cells_;
};

/// Size (in cells) of the largest 4-connected free component.
std::size_t largest_free_component(const OccupancyGrid& grid);

/// Labels free cells by 4-connected component; occupied cells get -1.
std::vector<int> label_free_components(const OccupancyGrid& grid);

struct MapGenParams {
  int width = 100;   // cells
  int height = 100;  // cells
  double resolution = 0.1;
  int n_walls = 0;
  double wall_min_length = 1.5;  // m
  double wall_max_length = 4.0;  // m
  double wall_thickness = 0.2;   // m
  int n_static = 0;
  double static_min_size = 0.3;  // m, side of a square block
  double static_max_size = 1.0;
};

class MapGenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MapFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Generates a bounded random map with the requested number of walls and
/// static blocks whose largest free component holds at least half of the free
/// cells. Regenerates up to 100 times before throwing MapGenerationError.
OccupancyGrid generate_random_map(std::uint64_t seed, const MapGenParams& params);

/// Text map format: "width height resolution" then `height` rows of '#'/'.'.
/// The first row is the top of the map (largest y).
OccupancyGrid parse_map(const std::string& text);
std::string format_map(const OccupancyGrid& grid);
OccupancyGrid load_map(const std::filesystem::path& path);
void save_map(const OccupancyGrid& grid, const std::filesystem::path& path);

}  // namespace navarena
