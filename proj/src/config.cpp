#include "socnav/config.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "socnav/errors.hpp"

namespace socnav {

double CameraModel::focal_px() const
{
  return (image_width / 2.0) / std::tan(hfov / 2.0);
}

namespace {

void require(bool ok, const std::string& what)
{
  if (!ok) throw ValidationError("config: " + what);
}

}  // namespace

void validate(const SocialNavConfig& c)
{
  require(c.cluster_distance_gate > 0, "cluster_distance_gate must be positive");
  require(c.meanshift_quantile > 0 && c.meanshift_quantile <= 1, "meanshift_quantile must be in (0, 1]");
  require(c.bbox_width_gate > 0, "bbox_width_gate must be positive");
  require(c.perception_window_t > 0, "perception_window_t must be positive");
  require(c.reask_wait > 0, "reask_wait must be positive");
  require(c.level_of_consideration >= 0, "level_of_consideration must be non-negative");
  require(c.max_asks >= 1, "max_asks must be at least 1");
  require(c.post_ask_policy.kind != PostAskPolicyKind::Abort || c.post_ask_policy.timeout_s > 0,
          "abort timeout must be positive");
  require(c.plan_fail_grace > 0, "plan_fail_grace must be positive");
  require(c.path_clear_lookahead > 0, "path_clear_lookahead must be positive");
  require(c.robot_radius > 0, "robot_radius must be positive");
  require(c.inflation_radius >= c.robot_radius, "inflation_radius must be >= robot_radius");
  require(c.goal_xy_tolerance > 0, "goal_xy_tolerance must be positive");
  require(c.dt > 0, "dt must be positive");
  require(c.detector_period_ticks >= 1, "detector_period_ticks must be at least 1");
  require(c.detection_miss_probability >= 0 && c.detection_miss_probability <= 1,
          "detection_miss_probability must be in [0, 1]");
  require(c.hear_radius > 0, "hear_radius must be positive");
  require(c.trace_snapshot_period > 0, "trace_snapshot_period must be positive");
  require(c.laser.fov > 0, "laser.fov must be positive");
  require(c.laser.beam_count >= 1, "laser.beam_count must be at least 1");
  require(c.laser.range_max > 0, "laser.range_max must be positive");
  require(c.camera.hfov > 0 && c.camera.hfov < std::numbers::pi, "camera.hfov must be in (0, 180) degrees");
  require(c.camera.image_width > 0, "camera.image_width must be positive");
  require(c.camera.person_width > 0, "camera.person_width must be positive");
  require(c.camera.range > 0, "camera.range must be positive");
}

}  // namespace socnav
