#include "socnav/costmap.hpp"

#include <algorithm>
#include <cmath>

#include "socnav/errors.hpp"

namespace socnav {

double Costmap::cost_at_distance(double d, double robot_radius, double inflation_radius)
{
  if (d <= robot_radius) return 1.0;
  if (d >= inflation_radius) return 0.0;
  return 1.0 - (d - robot_radius) / (inflation_radius - robot_radius);
}

bool Costmap::obstacle(Cell c) const
{
  if (base().blocking(c)) return true;
  return std::binary_search(dynamic_.begin(), dynamic_.end(), base().index(c));
}

bool Costmap::operator==(const Costmap& o) const
{
  if (!layer_ || !o.layer_) return layer_ == o.layer_;
  if (layer_ != o.layer_) {
    if (!(layer_->grid == o.layer_->grid) || layer_->robot_radius != o.layer_->robot_radius ||
        layer_->inflation_radius != o.layer_->inflation_radius || layer_->cost != o.layer_->cost)
      return false;
  }
  if (dynamic_ != o.dynamic_) return false;
  for (std::size_t i = 0; i < base().size(); ++i)
    if (cost(i) != o.cost(i)) return false;
  return true;
}

namespace {

template <typename Kernel>
void stamp(const OccupancyGrid& grid, const Kernel& kernel, Cell source, std::vector<double>& out)
{
  for (const auto& k : kernel) {
    const Cell c{source.col + k.dc, source.row + k.dr};
    if (!grid.in_bounds(c)) continue;
    double& v = out[grid.index(c)];
    if (k.cost > v) v = k.cost;
  }
}

}  // namespace

Costmap inflate(const OccupancyGrid& grid, double robot_radius, double inflation_radius)
{
  if (robot_radius < 0.0 || inflation_radius < robot_radius)
    throw ValidationError("inflate: need 0 <= robot_radius <= inflation_radius");

  auto layer = std::make_shared<Costmap::StaticLayer>();
  layer->grid = grid;
  layer->robot_radius = robot_radius;
  layer->inflation_radius = inflation_radius;
  layer->cost.assign(grid.size(), 0.0);

  const double res = grid.resolution();
  const int reach = static_cast<int>(std::ceil(inflation_radius / res)) + 1;
  for (int dr = -reach; dr <= reach; ++dr)
    for (int dc = -reach; dc <= reach; ++dc) {
      const double d = res * std::hypot(static_cast<double>(dc), static_cast<double>(dr));
      const double c = Costmap::cost_at_distance(d, robot_radius, inflation_radius);
      if (c > 0.0) layer->kernel.push_back({dc, dr, c});
    }

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Cell c = grid.cell_of(i);
    if (grid.blocking(c)) stamp(grid, layer->kernel, c, layer->cost);
  }

  Costmap out;
  out.layer_ = std::move(layer);
  return out;
}

Costmap with_dynamic_obstacles(const Costmap& costmap, std::vector<std::size_t> cells)
{
  const OccupancyGrid& grid = costmap.base();
  std::erase_if(cells, [&](std::size_t i) { return i >= grid.size(); });
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());

  Costmap out;
  out.layer_ = costmap.layer_;
  out.dynamic_ = std::move(cells);
  if (!out.dynamic_.empty()) {
    out.dynamic_cost_.assign(grid.size(), 0.0);
    for (std::size_t i : out.dynamic_) stamp(grid, out.layer_->kernel, grid.cell_of(i), out.dynamic_cost_);
  }
  return out;
}

Costmap inject_dynamic_obstacles(const Costmap& costmap, std::span<const Point2> points)
{
  if (points.empty()) return costmap;
  std::vector<std::size_t> cells = costmap.dynamic_obstacles();
  const std::size_t before = cells.size();
  for (const Point2& p : points)
    if (auto c = costmap.base().world_to_cell(p)) cells.push_back(costmap.base().index(*c));
  if (cells.size() == before) return costmap;
  return with_dynamic_obstacles(costmap, std::move(cells));
}

Costmap clear_costmap(const Costmap& costmap)
{
  return with_dynamic_obstacles(costmap, {});
}

}  // namespace socnav
