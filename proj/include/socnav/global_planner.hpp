#pragma once

#include <optional>

#include "socnav/costmap.hpp"
#include "socnav/path.hpp"

namespace socnav {

enum class PlanError { None, NoPath, LethalEndpoint };

const char* to_string(PlanError e);

struct PlanResult
{
  std::optional<Path> path;
  double cost = 0.0;  // accumulated edge cost of the grid path
  PlanError error = PlanError::None;

  bool ok() const { return path.has_value(); }
};

struct GlobalPlannerParams
{
  double cost_weight = 10.0;
};

/// Cost of stepping between two adjacent cells: step length (meters) times
/// 1 + w * mean(cost(from), cost(to)).
double step_cost(const Costmap& costmap, Cell from, Cell to, double cost_weight);

/// Whether the planner may step from `from` to neighbor `to`: in bounds, not
/// lethal, and for diagonals not squeezing between two lethal orthogonals.
bool step_allowed(const Costmap& costmap, Cell from, Cell to);

/// A* over the 8-connected grid with an admissible Euclidean heuristic.
/// Waypoints are cell centers with the start and goal poses at the ends.
PlanResult plan_global(const Costmap& costmap, const Pose2D& start, const Pose2D& goal,
                       const GlobalPlannerParams& params = {});

enum class PlanComparison { AdoptCandidate, PreferInteraction };

const char* to_string(PlanComparison c);

/// AdoptCandidate iff length(candidate) <= length(original) + level_of_consideration.
PlanComparison compare_plans(const Path& original, const Path& candidate,
                             double level_of_consideration);

/// The part of `path` still ahead of `robot`, starting at its nearest waypoint.
Path remaining_path(const Path& path, const Pose2D& robot);

}  // namespace socnav
