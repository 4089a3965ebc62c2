#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include <fmt/format.h>

#include "navarena/benchmark.hpp"

namespace navarena {

namespace {

constexpr std::array<const char*, 6> kPalette = {"#1f77b4", "#d62728", "#2ca02c",
                                                 "#9467bd", "#ff7f0e", "#8c564b"};

std::string planner_color(const std::string& name, const std::vector<std::string>& order) {
  if (name == "arena") return "#1f77b4";
  if (name == "dwa") return "#d62728";
  const auto it = std::find(order.begin(), order.end(), name);
  return kPalette[static_cast<std::size_t>(it - order.begin()) % kPalette.size()];
}

std::size_t cell_key(const OccupancyGrid& grid, const Vec2& p) {
  const CellIndex c = grid.world_to_cell(p);
  const int cx = std::clamp(c.x, 0, grid.width() - 1);
  const int cy = std::clamp(c.y, 0, grid.height() - 1);
  return grid.index(cx, cy);
}

}  // namespace

std::vector<std::vector<double>> segment_opacities(const std::vector<RunResult>& records,
                                                   const OccupancyGrid& grid) {
  // Visits per (planner, cell), each trajectory counted once per cell.
  std::map<std::string, std::map<std::size_t, int>> visits;
  std::map<std::string, int> runs;
  for (const auto& r : records) {
    ++runs[r.planner];
    std::set<std::size_t> seen;
    for (const auto& p : r.trajectory) seen.insert(cell_key(grid, p));
    auto& counts = visits[r.planner];
    for (std::size_t k : seen) ++counts[k];
  }
  std::vector<std::vector<double>> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    std::vector<double> op;
    const auto& counts = visits[r.planner];
    const double n = runs[r.planner];
    for (std::size_t i = 0; i + 1 < r.trajectory.size(); ++i) {
      const Vec2 mid = (r.trajectory[i] + r.trajectory[i + 1]) * 0.5;
      // A midpoint can fall in a cell that no sample point visited.
      const auto it = counts.find(cell_key(grid, mid));
      const int c = it == counts.end() ? 1 : it->second;
      op.push_back(c / n);
    }
    out.push_back(std::move(op));
  }
  return out;
}

std::string render_svg(const std::vector<RunResult>& records, const OccupancyGrid& grid,
                       const SvgOptions& options) {
  const double w = grid.width_m();
  const double h = grid.height_m();
  const double s = options.pixels_per_meter;
  std::string out;
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
      "viewBox=\"0 0 {:.0f} {:.0f}\">\n",
      w * s, h * s, w * s, h * s);
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += fmt::format("<g transform=\"matrix({} 0 0 {} 0 {})\">\n", s, -s, h * s);

  out += "<g id=\"map\" fill=\"#444\">\n";
  const double res = grid.resolution();
  for (int cy = 0; cy < grid.height(); ++cy) {
    int cx = 0;
    while (cx < grid.width()) {
      if (!grid.occupied(cx, cy)) {
        ++cx;
        continue;
      }
      const int begin = cx;
      while (cx < grid.width() && grid.occupied(cx, cy)) ++cx;
      out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/>\n", begin * res,
                         cy * res, (cx - begin) * res, res);
    }
  }
  out += "</g>\n";

  // Obstacle start states are shared across planners for a run index, so
  // draw each (scenario, run) once.
  out += "<g id=\"obstacles\" stroke=\"#888\" stroke-width=\"0.03\" fill=\"none\">\n";
  std::set<std::pair<std::string, int>> drawn;
  for (const auto& r : records) {
    if (!drawn.insert({r.scenario, r.run}).second) continue;
    for (const auto& o : r.initial_obstacles) {
      const Vec2 tip = o.position + o.velocity * 2.0;
      out += fmt::format("<circle cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"{:.3f}\"/>\n", o.position.x,
                         o.position.y, o.radius);
      out += fmt::format("<line x1=\"{:.3f}\" y1=\"{:.3f}\" x2=\"{:.3f}\" y2=\"{:.3f}\"/>\n",
                         o.position.x, o.position.y, tip.x, tip.y);
    }
  }
  out += "</g>\n";

  std::vector<std::string> order;
  for (const auto& r : records) {
    if (std::find(order.begin(), order.end(), r.planner) == order.end()) order.push_back(r.planner);
  }
  const auto opacities = segment_opacities(records, grid);
  out += "<g id=\"trajectories\" fill=\"none\" stroke-width=\"0.05\" stroke-linecap=\"round\" "
         "stroke-linejoin=\"round\">\n";
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& r = records[k];
    const auto& op = opacities[k];
    const std::string color = planner_color(r.planner, order);
    // Consecutive segments with equal opacity share one polyline.
    std::size_t i = 0;
    while (i < op.size()) {
      std::size_t j = i;
      while (j + 1 < op.size() && op[j + 1] == op[i]) ++j;
      std::string pts;
      for (std::size_t q = i; q <= j + 1; ++q) {
        if (!pts.empty()) pts += ' ';
        pts += fmt::format("{:.3f},{:.3f}", r.trajectory[q].x, r.trajectory[q].y);
      }
      out += fmt::format("<polyline data-planner=\"{}\" stroke=\"{}\" stroke-opacity=\"{:.4f}\" "
                         "points=\"{}\"/>\n",
                         r.planner, color, op[i], pts);
      i = j + 1;
    }
  }
  out += "</g>\n";

  out += "<g id=\"collisions\" fill=\"none\" stroke=\"#000\" stroke-width=\"0.03\">\n";
  for (const auto& r : records) {
    for (const auto& c : r.collision_points) {
      out += fmt::format("<circle cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"0.15\"/>\n", c.x, c.y);
    }
  }
  out += "</g>\n";

  if (options.start) {
    out += fmt::format("<circle id=\"start\" cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"0.12\" fill=\"#2ca02c\"/>\n",
                       options.start->x, options.start->y);
  }
  if (options.goal) {
    out += fmt::format("<circle id=\"goal\" cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"0.12\" fill=\"#ff7f0e\"/>\n",
                       options.goal->x, options.goal->y);
  }
  out += "</g>\n";

  out += "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"14\">\n";
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double y = 20.0 + 18.0 * static_cast<double>(i);
    out += fmt::format("<rect x=\"10\" y=\"{}\" width=\"12\" height=\"12\" fill=\"{}\"/>"
                       "<text x=\"28\" y=\"{}\">{}</text>\n",
                       y - 10, planner_color(order[i], order), y, order[i]);
  }
  out += "</g>\n</svg>\n";
  return out;
}

void export_svg(const std::vector<RunResult>& records, const OccupancyGrid& grid,
                const std::filesystem::path& path, const SvgOptions& options) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << render_svg(records, grid, options);
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace navarena
