#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "socnav/occupancy_grid.hpp"

namespace socnav {

/// Inflated cost layer over an OccupancyGrid.
///
/// Cost is 1 (lethal) within robot_radius of any obstacle cell center, decays
/// linearly to 0 at inflation_radius, and is 0 beyond. Obstacle cells are the
/// base grid's blocking cells plus the dynamic obstacle set. The static part is
/// shared between copies; dynamic obstacles live in their own layer so laser
/// updates only re-inflate what changed.
class Costmap
{
public:
  Costmap() = default;

  const OccupancyGrid& base() const { return layer_->grid; }
  double robot_radius() const { return layer_->robot_radius; }
  double inflation_radius() const { return layer_->inflation_radius; }

  double cost(std::size_t idx) const
  {
    double s = layer_->cost[idx];
    double d = dynamic_cost_.empty() ? 0.0 : dynamic_cost_[idx];
    return s > d ? s : d;
  }
  double cost(Cell c) const { return cost(base().index(c)); }
  bool lethal(std::size_t idx) const { return cost(idx) >= 1.0; }
  bool lethal(Cell c) const { return lethal(base().index(c)); }
  /// Lethal using the static layer only.
  bool statically_lethal(Cell c) const { return layer_->cost[base().index(c)] >= 1.0; }

  /// Cell is an obstacle source: blocking base cell or dynamic obstacle.
  bool obstacle(Cell c) const;

  /// Sorted, unique cell indices injected from sensor data.
  const std::vector<std::size_t>& dynamic_obstacles() const { return dynamic_; }

  /// Cost of a cell whose center is `d` meters from the nearest obstacle center.
  static double cost_at_distance(double d, double robot_radius, double inflation_radius);

  bool operator==(const Costmap& other) const;

  friend Costmap inflate(const OccupancyGrid&, double, double);
  friend Costmap with_dynamic_obstacles(const Costmap&, std::vector<std::size_t>);

private:
  struct StaticLayer
  {
    OccupancyGrid grid;
    double robot_radius = 0.0;
    double inflation_radius = 0.0;
    std::vector<double> cost;
    struct Offset { int dc, dr; double cost; };
    std::vector<Offset> kernel;  // non-zero footprint of one obstacle cell
  };

  std::shared_ptr<const StaticLayer> layer_;
  std::vector<std::size_t> dynamic_;
  std::vector<double> dynamic_cost_;  // empty when dynamic_ is empty
};

/// Builds the static inflated costmap. Requires inflation_radius >= robot_radius.
Costmap inflate(const OccupancyGrid& grid, double robot_radius, double inflation_radius);

/// Replaces the dynamic obstacle set (indices need not be sorted) and re-inflates it.
Costmap with_dynamic_obstacles(const Costmap& costmap, std::vector<std::size_t> cells);

/// Adds the cells containing `points` to the dynamic set. Out-of-bounds points
/// are ignored; the input costmap is not modified.
Costmap inject_dynamic_obstacles(const Costmap& costmap, std::span<const Point2> points);

/// Drops every dynamic obstacle, leaving the static inflation.
Costmap clear_costmap(const Costmap& costmap);

}  // namespace socnav
