#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "socnav/occupancy_grid.hpp"
#include "socnav/rng.hpp"
#include "socnav/types.hpp"

namespace socnav {

struct StaticPolicy
{
  bool operator==(const StaticPolicy&) const = default;
};

struct CompliantPolicy
{
  double p_comply = 1.0;
  double delay = 0.0;
  double sidestep = 1.0;
  /// The pedestrian only considers complying from the n-th ask it hears.
  int asks_needed = 1;

  bool operator==(const CompliantPolicy&) const = default;
};

struct WaypointsPolicy
{
  std::vector<Pose2D> waypoints;  // theta unused
  double speed = 0.0;
  bool loop = false;

  bool operator==(const WaypointsPolicy&) const = default;
};

struct ExternalPolicy
{
  bool operator==(const ExternalPolicy&) const = default;
};

using PedestrianPolicy = std::variant<StaticPolicy, CompliantPolicy, WaypointsPolicy, ExternalPolicy>;

/// Bystander relay: a pedestrian that did not comply itself still yields,
/// with probability p_relay, when a complying neighbor is within `radius`.
struct RelaySpec
{
  double p_relay = 0.0;
  double radius = 1.5;
  double sidestep = 1.0;  // used when the policy has no sidestep of its own

  bool operator==(const RelaySpec&) const = default;
};

struct PedestrianSpec
{
  std::string id;
  Pose2D start{};
  double radius = 0.3;
  PedestrianPolicy policy = StaticPolicy{};
  std::optional<RelaySpec> relay;

  bool operator==(const PedestrianSpec&) const = default;
};

enum class PedestrianMode { Idle, Yielding, Moving };

struct PedestrianState
{
  std::string id;
  Pose2D pose{};
  double radius = 0.3;
  PedestrianPolicy policy = StaticPolicy{};
  std::optional<RelaySpec> relay;

  PedestrianMode mode = PedestrianMode::Idle;
  double yield_until = 0.0;
  Point2 yield_target = Point2::Zero();
  bool has_yielded = false;   // a pedestrian steps aside at most once
  int asks_heard = 0;
  std::vector<int> heard_asks;
  std::size_t waypoint_index = 0;

  bool heard(int ask_id) const;
};

std::vector<PedestrianState> initial_states(const std::vector<PedestrianSpec>& specs);

/// Minimal view of an ask needed by the pedestrians.
struct AskNotice
{
  int ask_id = 0;
  double issued_at = 0.0;
};

/// Each Compliant pedestrian within hear_radius of the robot draws once from
/// `rng` and, on success, schedules a sidestep perpendicular to the
/// robot-to-goal direction after its delay. Relay draws follow, in order.
/// Returns the ids of pedestrians that scheduled a sidestep.
std::vector<std::string> on_ask(std::vector<PedestrianState>& peds, const AskNotice& ask,
                                const Pose2D& robot, const Point2& goal, Rng& rng,
                                double hear_radius);

/// Executes due sidesteps and advances waypoint walkers.
void step_pedestrians(std::vector<PedestrianState>& peds, const OccupancyGrid& map,
                      double dt, double clock);

/// Whether a disc fits on the map without touching an Occupied cell.
bool disc_is_free(const OccupancyGrid& map, const Point2& center, double radius);

/// `target` when it is free, else the nearest free cell center within
/// 2 * radius of it (lowest index on ties), else nullopt.
std::optional<Point2> clamp_to_free(const OccupancyGrid& map, const Point2& target, double radius);

/// Unit vector a pedestrian at `ped` steps along to clear the robot-to-goal line.
Point2 sidestep_direction(const Pose2D& robot, const Point2& goal, const Point2& ped);

/// Schedules an immediate sidestep (interactive "comply").
void schedule_yield(PedestrianState& ped, const Pose2D& robot, const Point2& goal, double at,
                    double sidestep);

double sidestep_of(const PedestrianState& ped);

}  // namespace socnav
