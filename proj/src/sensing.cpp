#include "socnav/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "socnav/errors.hpp"

namespace socnav {

namespace {

/// Amanatides-Woo traversal in the grid frame. Calls visit(cell, t_enter) for
/// every in-bounds cell the ray passes through, starting with the origin cell
/// (t_enter = 0), until visit returns true, the ray leaves the map, or
/// t_enter exceeds max_range.
template <typename Visit>
void traverse(const OccupancyGrid& map, const Point2& origin, double angle, double max_range, Visit visit)
{
  const double res = map.resolution();
  const Point2 o = map.to_grid_frame(origin);
  const double a = map.grid_frame_angle(angle);
  const double dx = std::cos(a), dy = std::sin(a);

  Cell cell{static_cast<int>(std::floor(o.x() / res)), static_cast<int>(std::floor(o.y() / res))};
  if (!map.in_bounds(cell)) return;

  constexpr double inf = std::numeric_limits<double>::infinity();
  const int step_c = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
  const int step_r = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
  double t_max_c = step_c > 0 ? ((cell.col + 1) * res - o.x()) / dx
                 : step_c < 0 ? (cell.col * res - o.x()) / dx
                              : inf;
  double t_max_r = step_r > 0 ? ((cell.row + 1) * res - o.y()) / dy
                 : step_r < 0 ? (cell.row * res - o.y()) / dy
                              : inf;
  const double t_delta_c = step_c != 0 ? res / std::abs(dx) : inf;
  const double t_delta_r = step_r != 0 ? res / std::abs(dy) : inf;

  if (visit(cell, 0.0)) return;
  for (;;) {
    double t;
    if (t_max_c <= t_max_r) {
      t = t_max_c;
      cell.col += step_c;
      t_max_c += t_delta_c;
    } else {
      t = t_max_r;
      cell.row += step_r;
      t_max_r += t_delta_r;
    }
    if (t > max_range || !map.in_bounds(cell)) return;
    if (visit(cell, std::max(t, 0.0))) return;
  }
}

}  // namespace

double LaserScan::angle(std::size_t i) const
{
  if (beam_count <= 1) return 0.5 * (angle_min + angle_max);
  return angle_min + static_cast<double>(i) * (angle_max - angle_min) / (beam_count - 1);
}

std::optional<double> cast_ray_grid(const OccupancyGrid& map, const Point2& origin, double angle,
                                    double max_range)
{
  std::optional<double> hit;
  traverse(map, origin, angle, max_range, [&](Cell c, double t) {
    if (map.occupied(c)) {
      hit = t;
      return true;
    }
    return false;
  });
  return hit;
}

std::optional<double> ray_disc_intersection(const Point2& origin, const Point2& dir, const Point2& center,
                                            double radius)
{
  const Point2 m = origin - center;
  const double b = m.dot(dir);
  const double c = m.squaredNorm() - radius * radius;
  if (c <= 0.0) return 0.0;  // origin inside the disc
  const double disc = b * b - c;
  if (disc < 0.0) return std::nullopt;
  const double t = -b - std::sqrt(disc);
  if (t < 0.0) return std::nullopt;
  return t;
}

LaserScan raycast_scan(const OccupancyGrid& map, std::span<const PedestrianState> pedestrians,
                       const Pose2D& robot, const LaserParams& params, double timestamp)
{
  if (!map.world_to_cell(robot.position())) throw OutOfBoundsError("robot is outside the map");

  LaserScan scan;
  scan.angle_min = -0.5 * params.fov;
  scan.angle_max = 0.5 * params.fov;
  scan.beam_count = params.beam_count;
  scan.range_max = params.range_max;
  scan.timestamp = timestamp;
  scan.ranges.resize(static_cast<std::size_t>(params.beam_count));

  const Point2 o = robot.position();
  for (std::size_t i = 0; i < scan.ranges.size(); ++i) {
    const double a = robot.theta + scan.angle(i);
    const Point2 dir{std::cos(a), std::sin(a)};
    double r = cast_ray_grid(map, o, a, params.range_max).value_or(std::numeric_limits<double>::infinity());
    for (const PedestrianState& p : pedestrians)
      if (auto t = ray_disc_intersection(o, dir, p.pose.position(), p.radius)) r = std::min(r, *t);
    scan.ranges[i] = r <= params.range_max ? r : scan.no_hit();
  }
  return scan;
}

std::vector<Point2> scan_to_points(const LaserScan& scan, const Pose2D& robot)
{
  std::vector<Point2> pts;
  for (std::size_t i = 0; i < scan.ranges.size(); ++i) {
    if (!scan.is_hit(i)) continue;
    const double a = robot.theta + scan.angle(i);
    pts.emplace_back(robot.x + scan.ranges[i] * std::cos(a), robot.y + scan.ranges[i] * std::sin(a));
  }
  return pts;
}

double bbox_width(const CameraModel& camera, double distance)
{
  return std::min(camera.focal_px() * camera.person_width / distance, static_cast<double>(camera.image_width));
}

std::vector<Detection> detect_people(const CameraModel& camera, const OccupancyGrid& map,
                                     std::span<const PedestrianState> pedestrians, const Pose2D& robot,
                                     double gate, double timestamp)
{
  std::vector<Detection> out;
  const Point2 o = robot.position();
  for (std::size_t i = 0; i < pedestrians.size(); ++i) {
    const PedestrianState& p = pedestrians[i];
    const Point2 rel = p.pose.position() - o;
    const double dist = rel.norm();
    if (!(dist > 0.0) || dist > camera.range) continue;
    const double world_bearing = std::atan2(rel.y(), rel.x());
    const double bearing = normalize_angle(world_bearing - robot.theta);
    if (std::abs(bearing) > 0.5 * camera.hfov) continue;

    if (auto wall = cast_ray_grid(map, o, world_bearing, dist); wall && *wall < dist) continue;
    const Point2 dir = rel / dist;
    const double own = std::max(dist - p.radius, 0.0);
    bool occluded = false;
    for (std::size_t j = 0; j < pedestrians.size() && !occluded; ++j) {
      if (j == i) continue;
      auto t = ray_disc_intersection(o, dir, pedestrians[j].pose.position(), pedestrians[j].radius);
      occluded = t && *t < own;
    }
    if (occluded) continue;

    const double w = bbox_width(camera, dist);
    if (w >= gate) out.push_back({p.id, w, bearing, dist, timestamp});
  }
  return out;
}

Costmap apply_scan(const Costmap& costmap, const LaserScan& scan, const Pose2D& robot)
{
  const OccupancyGrid& map = costmap.base();
  std::vector<std::size_t> cleared;
  std::vector<std::size_t> marked;
  const Point2 o = robot.position();

  for (std::size_t i = 0; i < scan.ranges.size(); ++i) {
    const double a = robot.theta + scan.angle(i);
    const bool hit = scan.is_hit(i);
    const double reach = hit ? scan.ranges[i] : scan.range_max;
    std::optional<std::size_t> hit_idx;
    if (hit) {
      const Point2 dir{std::cos(a), std::sin(a)};
      if (auto c = map.world_to_cell(o + (reach + 1e-6) * dir)) hit_idx = map.index(*c);
    }
    traverse(map, o, a, reach, [&](Cell c, double t) {
      const std::size_t idx = map.index(c);
      if (hit && (idx == hit_idx || t >= reach)) return true;
      cleared.push_back(idx);
      return false;
    });
    if (hit_idx && !map.blocking(map.cell_of(*hit_idx))) marked.push_back(*hit_idx);
  }

  std::sort(cleared.begin(), cleared.end());
  cleared.erase(std::unique(cleared.begin(), cleared.end()), cleared.end());

  std::vector<std::size_t> cells;
  for (std::size_t idx : costmap.dynamic_obstacles())
    if (!std::binary_search(cleared.begin(), cleared.end(), idx)) cells.push_back(idx);
  cells.insert(cells.end(), marked.begin(), marked.end());
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());

  if (cells == costmap.dynamic_obstacles()) return costmap;
  return with_dynamic_obstacles(costmap, std::move(cells));
}

}  // namespace socnav
