#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "socnav/config.hpp"
#include "socnav/costmap.hpp"
#include "socnav/occupancy_grid.hpp"
#include "socnav/pedestrians.hpp"

namespace socnav {

struct LaserScan
{
  double angle_min = 0.0;
  double angle_max = 0.0;
  int beam_count = 0;
  double range_max = 0.0;
  std::vector<double> ranges;
  double timestamp = 0.0;

  /// Range reported by beams that hit nothing.
  double no_hit() const { return range_max + 1.0; }
  bool is_hit(std::size_t i) const { return ranges[i] <= range_max; }
  double angle(std::size_t i) const;
};

struct Detection
{
  std::string pedestrian_id;
  double bbox_width = 0.0;  // pixels
  double bearing = 0.0;     // robot frame
  double distance = 0.0;    // to the pedestrian center
  double timestamp = 0.0;
};

/// Range along a ray (world frame) to the first Occupied cell boundary,
/// nullopt when none lies within max_range. Voxel traversal in the grid frame.
std::optional<double> cast_ray_grid(const OccupancyGrid& map, const Point2& origin,
                                    double angle, double max_range);

/// Distance along a unit ray to the first intersection with a disc.
std::optional<double> ray_disc_intersection(const Point2& origin, const Point2& dir,
                                            const Point2& center, double radius);

/// Throws OutOfBoundsError when the robot is off the map.
LaserScan raycast_scan(const OccupancyGrid& map, std::span<const PedestrianState> pedestrians,
                       const Pose2D& robot, const LaserParams& params, double timestamp = 0.0);

/// World-frame hit points, no-hit beams omitted.
std::vector<Point2> scan_to_points(const LaserScan& scan, const Pose2D& robot);

double bbox_width(const CameraModel& camera, double distance);

/// Ground-truth detector: pedestrians in the field of view, unoccluded and in
/// range, whose bounding box is at least `gate` pixels wide.
std::vector<Detection> detect_people(const CameraModel& camera, const OccupancyGrid& map,
                                     std::span<const PedestrianState> pedestrians,
                                     const Pose2D& robot, double gate, double timestamp = 0.0);

/// Obstacle-layer update: cells traversed by each beam lose their dynamic
/// mark, the cell hit by a beam gains one (unless it is already an Occupied
/// base cell).
Costmap apply_scan(const Costmap& costmap, const LaserScan& scan, const Pose2D& robot);

}  // namespace socnav
