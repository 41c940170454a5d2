#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "socnav/assessment.hpp"
#include "socnav/costmap.hpp"
#include "socnav/local_planner.hpp"
#include "socnav/pedestrians.hpp"
#include "socnav/rng.hpp"
#include "socnav/scenario.hpp"
#include "socnav/sensing.hpp"

namespace socnav {

struct TraceEvent
{
  double t = 0.0;
  std::int64_t tick = 0;
  std::string kind;
  nlohmann::json payload;
};

struct Metrics
{
  bool success = false;
  double time_to_goal = 0.0;  // final clock when the goal was not reached
  double executed_path_length = 0.0;
  int n_asks = 0;
  int n_replans = 0;
  double freeze_time = 0.0;
  std::optional<double> min_pedestrian_distance;  // center to center; none without pedestrians
  int n_collisions = 0;
};

struct RobotState
{
  Pose2D pose{};
  VelocityCommand vel{};
};

struct SetPedPose
{
  std::string ped_id;
  Pose2D pose{};
};

struct ResolveAsk
{
  std::string ped_id;
  bool comply = false;
};

using ExternalCommand = std::variant<SetPedPose, ResolveAsk>;

struct SimState
{
  std::shared_ptr<const Scenario> scenario;
  double clock = 0.0;
  std::int64_t tick = 0;
  RobotState robot{};
  std::vector<PedestrianState> pedestrians;
  AssessmentState assessment{};
  Costmap costmap;
  Rng rng;
  std::vector<TraceEvent> event_log;

  // per-tick observations, kept for snapshots
  LaserScan scan;
  std::vector<Point2> scan_points;
  std::vector<Detection> detections;
  std::optional<ClusterReport> last_cluster_report;

  PlanFailureTracker failure_tracker{};
  std::optional<RotateInPlace> rotation;
  Metrics metrics{};
  std::vector<std::string> in_contact;  // collision contacts active last tick
  double next_snapshot_at = 0.0;
};

/// Fresh simulation at t = 0 with the initial plan adopted on the static map.
SimState make_sim(const Scenario& scenario);
SimState make_sim(std::shared_ptr<const Scenario> scenario);

bool is_terminal(const SimState& sim);

/// Advances one dt: external commands, pedestrians, laser and obstacle layer,
/// detector, local planner and failure tracking, situation assessment, pose
/// integration, collision check, metrics. Throws TerminalStateError.
SimState step(SimState sim, Mode mode, std::span<const ExternalCommand> external_cmds = {});

/// Applies one external command; throws ValidationError for unknown ids or
/// poses that put the pedestrian into an occupied cell.
void apply_external(SimState& sim, const ExternalCommand& cmd);

struct RunResult
{
  Metrics metrics;
  std::vector<TraceEvent> trace;
};

RunResult run(const Scenario& scenario, Mode mode, double max_time);

/// Robot integration used by the loop (forward Euler, theta normalized).
Pose2D integrate(const Pose2D& pose, const VelocityCommand& cmd, double dt);

nlohmann::json snapshot(const SimState& sim);
nlohmann::json to_json(const Metrics& m);
nlohmann::json to_json(const TraceEvent& e);
std::string to_jsonl(const std::vector<TraceEvent>& trace);

}  // namespace socnav
