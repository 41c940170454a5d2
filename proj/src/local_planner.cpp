#include "socnav/local_planner.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "socnav/errors.hpp"

namespace socnav {

std::vector<Pose2D> rollout(const Pose2D& start, const VelocityCommand& cmd, double horizon, double step)
{
  const int n = static_cast<int>(std::lround(horizon / step));
  std::vector<Pose2D> poses;
  poses.reserve(static_cast<std::size_t>(n) + 1);
  poses.push_back(start);
  Pose2D p = start;
  for (int i = 0; i < n; ++i) {
    p.x += cmd.vx * std::cos(p.theta) * step;
    p.y += cmd.vx * std::sin(p.theta) * step;
    p.theta = normalize_angle(p.theta + cmd.omega * step);
    poses.push_back(p);
  }
  return poses;
}

bool disc_hits_obstacle(const Costmap& costmap, const Point2& center, double radius)
{
  const OccupancyGrid& g = costmap.base();
  const double res = g.resolution();
  const Point2 local = g.to_grid_frame(center);
  const int c0 = static_cast<int>(std::floor((local.x() - radius) / res));
  const int c1 = static_cast<int>(std::floor((local.x() + radius) / res));
  const int r0 = static_cast<int>(std::floor((local.y() - radius) / res));
  const int r1 = static_cast<int>(std::floor((local.y() + radius) / res));
  const double r2 = radius * radius;
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c) {
      const Cell cell{c, r};
      if (squared_distance_to_cell(g, local, cell) >= r2) continue;
      if (!g.in_bounds(cell) || costmap.obstacle(cell)) return true;
    }
  return false;
}

bool trajectory_collides(const Costmap& costmap, const std::vector<Pose2D>& trajectory, double robot_radius)
{
  const OccupancyGrid& g = costmap.base();
  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    const Point2 p = trajectory[i].position();
    const auto cell = g.world_to_cell(p);
    if (!cell) return true;
    if (costmap.lethal(*cell) || disc_hits_obstacle(costmap, p, robot_radius)) return true;
  }
  return false;
}

bool reachable_within_window(const Costmap& costmap, const Point2& from, const Point2& to, double half_size)
{
  const OccupancyGrid& g = costmap.base();
  const auto start = g.world_to_cell(from);
  const auto goal = g.world_to_cell(to);
  if (!start || !goal) return false;
  if (*start == *goal) return true;
  if (costmap.lethal(*goal)) return false;

  auto in_window = [&](Cell c) {
    const Point2 p = g.cell_to_world(c);
    return std::abs(p.x() - from.x()) <= half_size && std::abs(p.y() - from.y()) <= half_size;
  };
  if (!in_window(*goal)) return false;

  std::vector<char> seen(g.size(), 0);
  std::deque<Cell> queue{*start};
  seen[g.index(*start)] = 1;
  static constexpr int kDc[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int kDr[8] = {0, 0, 1, -1, 1, -1, 1, -1};
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    for (int k = 0; k < 8; ++k) {
      const Cell nb{c.col + kDc[k], c.row + kDr[k]};
      if (!g.in_bounds(nb) || seen[g.index(nb)] || !in_window(nb) || costmap.lethal(nb)) continue;
      if (kDc[k] != 0 && kDr[k] != 0 && costmap.lethal(Cell{nb.col, c.row}) && costmap.lethal(Cell{c.col, nb.row}))
        continue;
      if (nb == *goal) return true;
      seen[g.index(nb)] = 1;
      queue.push_back(nb);
    }
  }
  return false;
}

DwaResult dwa_select(const Costmap& costmap, const Pose2D& robot, const VelocityCommand& current_vel,
                     const Path& global_path, const DwaParams& params)
{
  DwaResult result;
  if (global_path.empty()) throw EmptyPathError("dwa_select: empty global path");

  const std::size_t nearest = global_path.nearest_index(robot.position());
  result.local_target = global_path.point_along(nearest, params.target_lookahead);
  result.target_reachable =
      reachable_within_window(costmap, robot.position(), result.local_target, params.local_window);

  const double v_lo = std::max(0.0, current_vel.vx - params.accel_x * params.window_dt);
  const double v_hi = std::min(params.vx_max, current_vel.vx + params.accel_x * params.window_dt);
  const double w_lo = std::max(-params.omega_max, current_vel.omega - params.accel_omega * params.window_dt);
  const double w_hi = std::min(params.omega_max, current_vel.omega + params.accel_omega * params.window_dt);

  auto sample = [](double lo, double hi, int i, int n) {
    if (n <= 1) return 0.5 * (lo + hi);
    return lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  };

  struct Candidate
  {
    VelocityCommand cmd;
    std::vector<Pose2D> traj;
    double path_dist = 0.0;
    double heading = 0.0;
    double target_dist = 0.0;
    double clearance = 0.0;
  };
  std::vector<Candidate> survivors;
  double min_target = std::numeric_limits<double>::infinity(), max_target = 0.0;
  // the global path is stair-stepped at cell size, so deviations below one cell are free
  const double path_deadband = costmap.base().resolution();
  const double path_scale = std::max(params.vx_max * params.horizon, 1e-9);

  for (int i = 0; i < params.vx_samples; ++i)
    for (int j = 0; j < params.omega_samples; ++j) {
      VelocityCommand cmd{sample(v_lo, v_hi, i, params.vx_samples), sample(w_lo, w_hi, j, params.omega_samples)};
      if (std::abs(cmd.omega) < 1e-12) cmd.omega = 0.0;
      auto traj = rollout(robot, cmd, params.horizon, params.sim_step);
      if (trajectory_collides(costmap, traj, params.robot_radius)) continue;

      Candidate c{cmd, std::move(traj)};
      const Pose2D& end = c.traj.back();
      c.path_dist = global_path.distance_to(end.position());
      const Point2 to_target = result.local_target - end.position();
      c.target_dist = to_target.norm();
      c.heading = c.target_dist > 0.0
                      ? std::abs(normalize_angle(std::atan2(to_target.y(), to_target.x()) - end.theta))
                      : 0.0;
      for (const Pose2D& p : c.traj)
        if (auto cell = costmap.base().world_to_cell(p.position()))
          c.clearance = std::max(c.clearance, costmap.cost(*cell));
      min_target = std::min(min_target, c.target_dist);
      max_target = std::max(max_target, c.target_dist);
      survivors.push_back(std::move(c));
    }

  result.valid_samples = static_cast<int>(survivors.size());
  if (survivors.empty() || !result.target_reachable) return result;

  const Candidate* best = nullptr;
  double best_score = std::numeric_limits<double>::infinity();
  for (const Candidate& c : survivors) {
    const double path_term = std::min(1.0, std::max(0.0, c.path_dist - path_deadband) / path_scale);
    // ranked across the window: at low speed the absolute differences are tiny
    const double spread = max_target - min_target;
    const double target_term = spread > 1e-12 ? (c.target_dist - min_target) / spread : 0.0;
    const double goal_term = 0.5 * c.heading / std::numbers::pi + 0.5 * target_term;
    const double score =
        params.path_weight * path_term + params.goal_weight * goal_term + params.clearance_weight * c.clearance;
    bool better = score < best_score;
    if (!better && score == best_score) {
      const double aw = std::abs(c.cmd.omega), bw = std::abs(best->cmd.omega);
      better = aw < bw || (aw == bw && c.cmd.vx < best->cmd.vx);
    }
    if (better) {
      best = &c;
      best_score = score;
    }
  }
  result.command = best->cmd;
  result.trajectory = best->traj;
  return result;
}

std::optional<PlanFailure> PlanFailureTracker::update(double clock, bool no_valid_plan, const Pose2D& robot)
{
  if (last_clock_ && clock < *last_clock_) throw ClockRegressionError("plan failure tracker: clock went backwards");
  last_clock_ = clock;
  if (!no_valid_plan) {
    run_start_.reset();
    emitted_ = false;
    return std::nullopt;
  }
  if (!run_start_) {
    run_start_ = clock;
    emitted_ = false;
  }
  const double duration = clock - *run_start_;
  if (emitted_ || duration < grace_ - 1e-9) return std::nullopt;
  emitted_ = true;
  return PlanFailure{*run_start_, duration, robot};
}

void PlanFailureTracker::reset()
{
  run_start_.reset();
  emitted_ = false;
}

std::optional<VelocityCommand> RotateInPlace::next(double dt)
{
  if (aborted_ || complete()) return std::nullopt;
  const double step = std::min(omega_max_ * dt, target_ - rotated_);
  rotated_ += step;
  return VelocityCommand{0.0, step / dt};
}

}  // namespace socnav
