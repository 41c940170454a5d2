#pragma once

#include <cstddef>
#include <vector>

#include "socnav/types.hpp"

namespace socnav {

double path_length(const std::vector<Pose2D>& waypoints);

/// Ordered waypoints with a cached Euclidean length (theta ignored).
class Path
{
public:
  Path() = default;
  explicit Path(std::vector<Pose2D> waypoints);

  const std::vector<Pose2D>& waypoints() const { return waypoints_; }
  double length() const { return length_; }
  bool empty() const { return waypoints_.empty(); }
  std::size_t size() const { return waypoints_.size(); }
  const Pose2D& front() const { return waypoints_.front(); }
  const Pose2D& back() const { return waypoints_.back(); }

  /// Index of the waypoint closest to `p` (first on ties).
  std::size_t nearest_index(const Point2& p) const;
  /// Arc length from waypoint `from` to the end.
  double remaining_length(std::size_t from) const;
  /// Point at arc length `s` from waypoint `from`, clamped to the last waypoint.
  Point2 point_along(std::size_t from, double s) const;
  /// Euclidean distance from `p` to the polyline.
  double distance_to(const Point2& p) const;

  bool operator==(const Path& o) const { return waypoints_ == o.waypoints_; }

private:
  std::vector<Pose2D> waypoints_;
  std::vector<double> cumulative_;  // arc length at each waypoint
  double length_ = 0.0;
};

/// Throws EmptyPathError when the path has no waypoints.
double path_length(const Path& path);

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b);

}  // namespace socnav
