#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Core>

namespace socnav {

using Point2 = Eigen::Vector2d;

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a + std::numbers::pi, two_pi);
  if (r <= 0.0) r += two_pi;
  return r - std::numbers::pi;
}

/// Planar pose. theta is kept in (-pi, pi] by every constructor path that
/// goes through make_pose(); aggregate init is left raw for tests.
struct Pose2D
{
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Point2 position() const { return {x, y}; }

  bool operator==(const Pose2D&) const = default;
};

inline Pose2D make_pose(double x, double y, double theta)
{
  return {x, y, normalize_angle(theta)};
}

inline double distance(const Pose2D& a, const Pose2D& b)
{
  return std::hypot(a.x - b.x, a.y - b.y);
}

struct VelocityCommand
{
  double vx = 0.0;     // m/s forward
  double omega = 0.0;  // rad/s

  bool operator==(const VelocityCommand&) const = default;
};

/// Planner/simulation operating mode.
enum class Mode { Baseline, Social };

const char* to_string(Mode m);
Mode mode_from_string(const std::string& s);

}  // namespace socnav
