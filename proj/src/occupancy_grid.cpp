#include "socnav/occupancy_grid.hpp"

#include <algorithm>
#include <cmath>

#include "socnav/errors.hpp"

namespace socnav {

OccupancyGrid::OccupancyGrid(int width, int height, double resolution, Pose2D origin,
                             std::vector<CellState> cells)
    : width_(width), height_(height), resolution_(resolution), origin_(origin), cells_(std::move(cells))
{
  if (width <= 0 || height <= 0) throw ValidationError("grid dimensions must be positive");
  if (!(resolution > 0.0)) throw ValidationError("grid resolution must be positive");
  if (cells_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw ValidationError("grid cell count does not match width * height");
}

OccupancyGrid::OccupancyGrid(int width, int height, double resolution, Pose2D origin)
    : OccupancyGrid(width, height, resolution, origin,
                    std::vector<CellState>(static_cast<std::size_t>(std::max(width, 0)) *
                                               static_cast<std::size_t>(std::max(height, 0)),
                                           CellState::Free))
{
}

Point2 OccupancyGrid::to_grid_frame(const Point2& world) const
{
  const double dx = world.x() - origin_.x;
  const double dy = world.y() - origin_.y;
  if (origin_.theta == 0.0) return {dx, dy};
  const double c = std::cos(origin_.theta), s = std::sin(origin_.theta);
  return {c * dx + s * dy, -s * dx + c * dy};
}

Point2 OccupancyGrid::from_grid_frame(const Point2& local) const
{
  if (origin_.theta == 0.0) return {local.x() + origin_.x, local.y() + origin_.y};
  const double c = std::cos(origin_.theta), s = std::sin(origin_.theta);
  return {c * local.x() - s * local.y() + origin_.x, s * local.x() + c * local.y() + origin_.y};
}

std::optional<Cell> OccupancyGrid::world_to_cell(const Point2& world) const
{
  const Point2 g = to_grid_frame(world);
  const double fc = std::floor(g.x() / resolution_);
  const double fr = std::floor(g.y() / resolution_);
  if (!(fc >= 0.0 && fr >= 0.0 && fc < width_ && fr < height_)) return std::nullopt;
  return Cell{static_cast<int>(fc), static_cast<int>(fr)};
}

Point2 OccupancyGrid::cell_to_world(Cell c) const
{
  return from_grid_frame({(c.col + 0.5) * resolution_, (c.row + 0.5) * resolution_});
}

double squared_distance_to_cell(const OccupancyGrid& grid, const Point2& local, Cell c)
{
  const double r = grid.resolution();
  const double x0 = c.col * r, y0 = c.row * r;
  const double dx = std::max({x0 - local.x(), 0.0, local.x() - (x0 + r)});
  const double dy = std::max({y0 - local.y(), 0.0, local.y() - (y0 + r)});
  return dx * dx + dy * dy;
}

}  // namespace socnav
