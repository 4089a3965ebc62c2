#include "navarena/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "navarena/random.hpp"

namespace navarena {

OccupancyGrid::OccupancyGrid(int width, int height, double resolution)
    : width_(width), height_(height), resolution_(resolution) {
  if (width < 1 || height < 1) throw std::invalid_argument("grid dimensions must be positive");
  if (!(resolution > 0.0)) throw std::invalid_argument("grid resolution must be positive");
  cells_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
  for (int cx = 0; cx < width_; ++cx) {
    cells_[index(cx, 0)] = 1;
    cells_[index(cx, height_ - 1)] = 1;
  }
  for (int cy = 0; cy < height_; ++cy) {
    cells_[index(0, cy)] = 1;
    cells_[index(width_ - 1, cy)] = 1;
  }
}

void OccupancyGrid::set_occupied(int cx, int cy, bool value) {
  if (!in_bounds(cx, cy)) throw std::out_of_range("cell outside grid");
  if (is_border(cx, cy)) return;
  cells_[index(cx, cy)] = value ? 1 : 0;
}

CellIndex OccupancyGrid::world_to_cell(const Vec2& p) const {
  return {static_cast<int>(std::floor(p.x / resolution_)),
          static_cast<int>(std::floor(p.y / resolution_))};
}

bool OccupancyGrid::disc_overlaps(const Vec2& c, double radius) const {
  const int x0 = static_cast<int>(std::floor((c.x - radius) / resolution_));
  const int x1 = static_cast<int>(std::floor((c.x + radius) / resolution_));
  const int y0 = static_cast<int>(std::floor((c.y - radius) / resolution_));
  const int y1 = static_cast<int>(std::floor((c.y + radius) / resolution_));
  const double r2 = radius * radius;
  for (int cy = y0; cy <= y1; ++cy) {
    for (int cx = x0; cx <= x1; ++cx) {
      if (!occupied(cx, cy)) continue;
      // Closest point of the cell's box to the disc center.
      const double lx = cx * resolution_;
      const double ly = cy * resolution_;
      const double px = std::clamp(c.x, lx, lx + resolution_);
      const double py = std::clamp(c.y, ly, ly + resolution_);
      const double dx = c.x - px;
      const double dy = c.y - py;
      if (dx * dx + dy * dy < r2) return true;
    }
  }
  return false;
}

std::size_t OccupancyGrid::free_count() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), 0));
}

std::vector<int> label_free_components(const OccupancyGrid& grid) {
  std::vector<int> label(grid.cell_count(), -1);
  std::vector<CellIndex> stack;
  int next = 0;
  for (int cy = 0; cy < grid.height(); ++cy) {
    for (int cx = 0; cx < grid.width(); ++cx) {
      if (grid.occupied(cx, cy) || label[grid.index(cx, cy)] >= 0) continue;
      label[grid.index(cx, cy)] = next;
      stack.push_back({cx, cy});
      while (!stack.empty()) {
        const CellIndex c = stack.back();
        stack.pop_back();
        constexpr int kDx[4] = {1, -1, 0, 0};
        constexpr int kDy[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int nx = c.x + kDx[k];
          const int ny = c.y + kDy[k];
          if (grid.occupied(nx, ny)) continue;
          int& l = label[grid.index(nx, ny)];
          if (l >= 0) continue;
          l = next;
          stack.push_back({nx, ny});
        }
      }
      ++next;
    }
  }
  return label;
}

std::size_t largest_free_component(const OccupancyGrid& grid) {
  const auto label = label_free_components(grid);
  const int n = label.empty() ? 0 : *std::max_element(label.begin(), label.end()) + 1;
  std::vector<std::size_t> sizes(static_cast<std::size_t>(n), 0);
  for (int l : label) {
    if (l >= 0) ++sizes[static_cast<std::size_t>(l)];
  }
  return sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
}

namespace {

void fill_rect(OccupancyGrid& grid, int x0, int y0, int x1, int y1) {
  for (int cy = std::max(y0, 0); cy <= std::min(y1, grid.height() - 1); ++cy) {
    for (int cx = std::max(x0, 0); cx <= std::min(x1, grid.width() - 1); ++cx) {
      grid.set_occupied(cx, cy, true);
    }
  }
}

int to_cells(double meters, double resolution) {
  return std::max(1, static_cast<int>(std::lround(meters / resolution)));
}

}  // namespace

OccupancyGrid generate_random_map(std::uint64_t seed, const MapGenParams& p) {
  if (p.width < 3 || p.height < 3) throw std::invalid_argument("map must be at least 3x3 cells");
  if (p.n_walls < 0 || p.n_static < 0) throw std::invalid_argument("negative obstacle count");
  if (p.wall_min_length > p.wall_max_length || p.static_min_size > p.static_max_size) {
    throw std::invalid_argument("inverted size range");
  }
  Rng rng(seed);
  constexpr int kMaxAttempts = 100;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    OccupancyGrid grid(p.width, p.height, p.resolution);
    const int thick = to_cells(p.wall_thickness, p.resolution);
    for (int i = 0; i < p.n_walls; ++i) {
      const int len = to_cells(uniform(rng, p.wall_min_length, p.wall_max_length), p.resolution);
      const bool horizontal = uniform_int(rng, 0, 1) == 0;
      const int x = uniform_int(rng, 1, p.width - 2);
      const int y = uniform_int(rng, 1, p.height - 2);
      if (horizontal) {
        fill_rect(grid, x, y, x + len - 1, y + thick - 1);
      } else {
        fill_rect(grid, x, y, x + thick - 1, y + len - 1);
      }
    }
    for (int i = 0; i < p.n_static; ++i) {
      const int side = to_cells(uniform(rng, p.static_min_size, p.static_max_size), p.resolution);
      const int x = uniform_int(rng, 1, std::max(1, p.width - 1 - side));
      const int y = uniform_int(rng, 1, std::max(1, p.height - 1 - side));
      fill_rect(grid, x, y, x + side - 1, y + side - 1);
    }
    const std::size_t free = grid.free_count();
    if (free > 0 && 2 * largest_free_component(grid) >= free) return grid;
  }
  throw MapGenerationError("no connected map after 100 attempts; parameters infeasible");
}

OccupancyGrid parse_map(const std::string& text) {
  std::istringstream in(text);
  int width = 0;
  int height = 0;
  double resolution = 0.0;
  if (!(in >> width >> height >> resolution)) throw MapFormatError("bad map header");
  if (width < 1 || height < 1 || !(resolution > 0.0)) throw MapFormatError("bad map dimensions");
  OccupancyGrid grid(width, height, resolution);
  std::string row;
  std::getline(in, row);  // rest of header line
  for (int r = 0; r < height; ++r) {
    if (!std::getline(in, row)) throw MapFormatError("map truncated");
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (static_cast<int>(row.size()) != width) {
      throw MapFormatError("row " + std::to_string(r) + " has wrong width");
    }
    const int cy = height - 1 - r;
    for (int cx = 0; cx < width; ++cx) {
      const char ch = row[static_cast<std::size_t>(cx)];
      if (ch != '#' && ch != '.') throw MapFormatError("unexpected map character");
      if (ch == '.' && grid.is_border(cx, cy)) throw MapFormatError("map border must be occupied");
      grid.set_occupied(cx, cy, ch == '#');
    }
  }
  return grid;
}

std::string format_map(const OccupancyGrid& grid) {
  std::ostringstream out;
  out.precision(17);
  out << grid.width() << ' ' << grid.height() << ' ' << grid.resolution() << '\n';
  for (int cy = grid.height() - 1; cy >= 0; --cy) {
    for (int cx = 0; cx < grid.width(); ++cx) out << (grid.occupied(cx, cy) ? '#' : '.');
    out << '\n';
  }
  return out.str();
}

OccupancyGrid load_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MapFormatError("cannot open map file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_map(buf.str());
}

void save_map(const OccupancyGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write map file " + path.string());
  out << format_map(grid);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace navarena
