#pragma once

#include <numbers>
#include <string>

namespace socnav {

enum class PostAskPolicyKind { FreezeUntilClear, Abort };

struct PostAskPolicy
{
  PostAskPolicyKind kind = PostAskPolicyKind::FreezeUntilClear;
  double timeout_s = 0.0;  // Abort only: seconds after the last ask

  bool operator==(const PostAskPolicy&) const = default;
};

/// Forward virtual laser.
struct LaserParams
{
  double fov = 58.0 * std::numbers::pi / 180.0;
  int beam_count = 120;
  double range_max = 5.0;

  bool operator==(const LaserParams&) const = default;
};

/// Pinhole camera standing in for the people detector.
struct CameraModel
{
  double hfov = 58.0 * std::numbers::pi / 180.0;
  int image_width = 320;
  double person_width = 0.5;
  double range = 8.0;

  double focal_px() const;

  bool operator==(const CameraModel&) const = default;
};

/// Every tunable of the framework. Defaults are the reference values; the
/// scenario file may override any of them by key.
struct SocialNavConfig
{
  // situation assessment
  double cluster_distance_gate = 3.0;
  double meanshift_quantile = 0.20;
  double bbox_width_gate = 80.0;
  double perception_window_t = 2.0;
  double reask_wait = 5.0;
  double level_of_consideration = 0.0;
  int max_asks = 2;
  PostAskPolicy post_ask_policy{};
  double plan_fail_grace = 2.0;
  double path_clear_lookahead = 2.0;
  std::string utterance = "Excuse me, may I pass, please?";

  // robot
  double robot_radius = 0.25;
  double inflation_radius = 0.55;
  double goal_xy_tolerance = 0.25;

  // simulation
  double dt = 0.05;
  int detector_period_ticks = 4;
  double detection_miss_probability = 0.0;
  double hear_radius = 4.0;
  double trace_snapshot_period = 1.0;

  LaserParams laser{};
  CameraModel camera{};

  bool operator==(const SocialNavConfig&) const = default;
};

/// Throws ValidationError on the first violated invariant.
void validate(const SocialNavConfig& config);

}  // namespace socnav
