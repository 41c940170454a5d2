#pragma once

#include <numbers>
#include <optional>
#include <vector>

#include "socnav/costmap.hpp"
#include "socnav/path.hpp"
#include "socnav/types.hpp"

namespace socnav {

struct DwaParams
{
  double vx_max = 0.5;
  double omega_max = 1.0;
  double accel_x = 0.5;
  double accel_omega = 1.5;
  double window_dt = 0.05;  // control period the window is computed over
  int vx_samples = 11;
  int omega_samples = 11;
  double horizon = 1.5;
  double sim_step = 0.1;

  double path_weight = 2.0;
  double goal_weight = 1.0;
  double clearance_weight = 0.5;

  double robot_radius = 0.25;
  /// Arc length ahead of the robot's nearest waypoint used as local target.
  double target_lookahead = 1.0;
  /// Half-size of the square local window the target must be reachable in.
  double local_window = 2.5;
};

struct DwaResult
{
  std::optional<VelocityCommand> command;  // nullopt means NoValidPlan
  Point2 local_target = Point2::Zero();
  bool target_reachable = false;
  int valid_samples = 0;
  std::vector<Pose2D> trajectory;  // of the selected command
};

/// Unicycle rollout at a constant command; the first pose is `start`.
std::vector<Pose2D> rollout(const Pose2D& start, const VelocityCommand& cmd, double horizon,
                            double step);

/// True when the rolled-out robot disc touches an obstacle cell, a pose center
/// falls in a lethal cell, or a pose leaves the map. The start pose is skipped.
bool trajectory_collides(const Costmap& costmap, const std::vector<Pose2D>& trajectory,
                         double robot_radius);

/// Whether the disc at `center` overlaps an obstacle cell of the costmap.
bool disc_hits_obstacle(const Costmap& costmap, const Point2& center, double radius);

/// Flood fill through non-lethal cells inside the square window around `from`.
bool reachable_within_window(const Costmap& costmap, const Point2& from, const Point2& to,
                             double half_size);

/// Dynamic window selection.
///
/// Samples an 11x11 grid of (vx, omega) inside the acceleration-limited window
/// around current_vel, rolls each out over the horizon and drops colliding
/// ones. Survivors are scored on distance to the global path (beyond a
/// one-cell deadband, scaled by the horizon reach), heading and remaining
/// distance to the local target (ranked across the window), and traversed
/// cell cost, each in [0, 1]. Ties go to smaller |omega|, then smaller vx.
/// No valid plan is reported when every sample collides or the local target on
/// the path cannot be reached through the local window.
DwaResult dwa_select(const Costmap& costmap, const Pose2D& robot, const VelocityCommand& current_vel,
                     const Path& global_path, const DwaParams& params = {});

struct PlanFailure
{
  double first_failed_at = 0.0;
  double duration = 0.0;
  Pose2D robot_pose{};
};

/// Debounces NoValidPlan outcomes. Emits one PlanFailure per contiguous run
/// once it has lasted `grace` seconds; any valid command resets the run.
class PlanFailureTracker
{
public:
  explicit PlanFailureTracker(double grace = 2.0) : grace_(grace) {}

  /// Throws ClockRegressionError when clock goes backwards.
  std::optional<PlanFailure> update(double clock, bool no_valid_plan, const Pose2D& robot);
  void reset();

  bool in_failure_run() const { return run_start_.has_value(); }

private:
  double grace_;
  std::optional<double> last_clock_;
  std::optional<double> run_start_;
  bool emitted_ = false;
};

/// Rotate-in-place recovery: (0, +omega_max) until a full turn is done.
class RotateInPlace
{
public:
  explicit RotateInPlace(double omega_max = 1.0, double target = 2.0 * std::numbers::pi)
      : omega_max_(omega_max), target_(target) {}

  /// Next command for a control period of dt, nullopt when complete or aborted.
  std::optional<VelocityCommand> next(double dt);
  void abort() { aborted_ = true; }

  double rotated() const { return rotated_; }
  bool complete() const { return rotated_ >= target_ - 1e-12; }
  bool aborted() const { return aborted_; }

private:
  double omega_max_;
  double target_;
  double rotated_ = 0.0;
  bool aborted_ = false;
};

}  // namespace socnav
