#include "socnav/path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "socnav/errors.hpp"

namespace socnav {

double path_length(const std::vector<Pose2D>& waypoints)
{
  if (waypoints.empty()) throw EmptyPathError("path has no waypoints");
  double total = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) total += distance(waypoints[i - 1], waypoints[i]);
  return total;
}

double path_length(const Path& path)
{
  return path_length(path.waypoints());
}

Path::Path(std::vector<Pose2D> waypoints) : waypoints_(std::move(waypoints))
{
  cumulative_.resize(waypoints_.size(), 0.0);
  for (std::size_t i = 1; i < waypoints_.size(); ++i)
    cumulative_[i] = cumulative_[i - 1] + distance(waypoints_[i - 1], waypoints_[i]);
  length_ = cumulative_.empty() ? 0.0 : cumulative_.back();
}

std::size_t Path::nearest_index(const Point2& p) const
{
  if (waypoints_.empty()) throw EmptyPathError("path has no waypoints");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < waypoints_.size(); ++i) {
    const double d = (waypoints_[i].position() - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

double Path::remaining_length(std::size_t from) const
{
  if (waypoints_.empty()) return 0.0;
  from = std::min(from, waypoints_.size() - 1);
  return length_ - cumulative_[from];
}

Point2 Path::point_along(std::size_t from, double s) const
{
  if (waypoints_.empty()) throw EmptyPathError("path has no waypoints");
  from = std::min(from, waypoints_.size() - 1);
  const double target = cumulative_[from] + std::max(s, 0.0);
  for (std::size_t i = from + 1; i < waypoints_.size(); ++i) {
    if (cumulative_[i] >= target) {
      const double seg = cumulative_[i] - cumulative_[i - 1];
      const double t = seg > 0.0 ? (target - cumulative_[i - 1]) / seg : 1.0;
      return waypoints_[i - 1].position() + t * (waypoints_[i].position() - waypoints_[i - 1].position());
    }
  }
  return waypoints_.back().position();
}

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b)
{
  const Point2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

double Path::distance_to(const Point2& p) const
{
  if (waypoints_.empty()) throw EmptyPathError("path has no waypoints");
  if (waypoints_.size() == 1) return (waypoints_[0].position() - p).norm();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < waypoints_.size(); ++i)
    best = std::min(best, point_segment_distance(p, waypoints_[i - 1].position(), waypoints_[i].position()));
  return best;
}

}  // namespace socnav
