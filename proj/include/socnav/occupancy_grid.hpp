#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "socnav/types.hpp"

namespace socnav {

enum class CellState : std::uint8_t { Free, Occupied, Unknown };

struct Cell
{
  int col = 0;
  int row = 0;

  bool operator==(const Cell&) const = default;
};

/// Static map. Cell (0,0) has its lower-left corner at `origin`; rows grow
/// along the origin's +y axis, columns along +x.
class OccupancyGrid
{
public:
  OccupancyGrid() = default;
  OccupancyGrid(int width, int height, double resolution, Pose2D origin,
                std::vector<CellState> cells);
  OccupancyGrid(int width, int height, double resolution, Pose2D origin = {});

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  const Pose2D& origin() const { return origin_; }
  std::size_t size() const { return cells_.size(); }
  const std::vector<CellState>& cells() const { return cells_; }

  bool in_bounds(Cell c) const
  {
    return c.col >= 0 && c.row >= 0 && c.col < width_ && c.row < height_;
  }
  std::size_t index(Cell c) const
  {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(c.col);
  }
  Cell cell_of(std::size_t idx) const
  {
    return {static_cast<int>(idx % static_cast<std::size_t>(width_)),
            static_cast<int>(idx / static_cast<std::size_t>(width_))};
  }

  CellState at(Cell c) const { return cells_[index(c)]; }
  void set(Cell c, CellState s) { cells_[index(c)] = s; }

  bool occupied(Cell c) const { return at(c) == CellState::Occupied; }
  /// Occupied or Unknown: both block the robot.
  bool blocking(Cell c) const { return at(c) != CellState::Free; }

  /// World point expressed in the grid frame (meters, origin at cell (0,0) corner).
  Point2 to_grid_frame(const Point2& world) const;
  Point2 from_grid_frame(const Point2& local) const;
  double grid_frame_angle(double world_theta) const { return world_theta - origin_.theta; }

  /// Cell containing a world point, nullopt when out of bounds.
  std::optional<Cell> world_to_cell(const Point2& world) const;
  /// Center of a cell in world coordinates.
  Point2 cell_to_world(Cell c) const;

  bool operator==(const OccupancyGrid&) const = default;

private:
  int width_ = 0;
  int height_ = 0;
  double resolution_ = 1.0;
  Pose2D origin_{};
  std::vector<CellState> cells_;
};

/// Squared distance from a point (grid frame) to the square of cell `c`.
double squared_distance_to_cell(const OccupancyGrid& grid, const Point2& local, Cell c);

}  // namespace socnav
