#include "socnav/global_planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "socnav/errors.hpp"

namespace socnav {

const char* to_string(PlanError e)
{
  switch (e) {
    case PlanError::None: return "none";
    case PlanError::NoPath: return "no_path";
    case PlanError::LethalEndpoint: return "lethal_endpoint";
  }
  return "?";
}

const char* to_string(PlanComparison c)
{
  return c == PlanComparison::AdoptCandidate ? "adopt_candidate" : "prefer_interaction";
}

double step_cost(const Costmap& costmap, Cell from, Cell to, double cost_weight)
{
  const bool diagonal = from.col != to.col && from.row != to.row;
  const double len = costmap.base().resolution() * (diagonal ? std::numbers::sqrt2 : 1.0);
  return len * (1.0 + cost_weight * 0.5 * (costmap.cost(from) + costmap.cost(to)));
}

bool step_allowed(const Costmap& costmap, Cell from, Cell to)
{
  const OccupancyGrid& g = costmap.base();
  if (!g.in_bounds(to) || costmap.lethal(to)) return false;
  if (from.col != to.col && from.row != to.row) {
    const Cell a{to.col, from.row};
    const Cell b{from.col, to.row};
    if (costmap.lethal(a) && costmap.lethal(b)) return false;
  }
  return true;
}

PlanResult plan_global(const Costmap& costmap, const Pose2D& start, const Pose2D& goal,
                       const GlobalPlannerParams& params)
{
  const OccupancyGrid& g = costmap.base();
  const auto sc = g.world_to_cell(start.position());
  const auto gc = g.world_to_cell(goal.position());
  if (!sc || !gc) throw OutOfBoundsError("plan_global: start or goal outside the map");

  PlanResult result;
  if (costmap.lethal(*sc) || costmap.lethal(*gc)) {
    result.error = PlanError::LethalEndpoint;
    return result;
  }

  const std::size_t n = g.size();
  const std::size_t start_idx = g.index(*sc);
  const std::size_t goal_idx = g.index(*gc);
  const double res = g.resolution();
  auto heuristic = [&](Cell c) {
    return res * std::hypot(static_cast<double>(c.col - gc->col), static_cast<double>(c.row - gc->row));
  };

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> cost_so_far(n, inf);
  std::vector<std::size_t> parent(n, n);
  std::vector<char> closed(n, 0);

  using Entry = std::pair<double, std::size_t>;  // (f, index): index breaks ties
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  cost_so_far[start_idx] = 0.0;
  open.push({heuristic(*sc), start_idx});

  static constexpr int kDc[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int kDr[8] = {0, 0, 1, -1, 1, -1, 1, -1};

  while (!open.empty()) {
    const auto [f, idx] = open.top();
    open.pop();
    if (closed[idx]) continue;
    closed[idx] = 1;
    if (idx == goal_idx) break;
    const Cell c = g.cell_of(idx);
    for (int k = 0; k < 8; ++k) {
      const Cell nb{c.col + kDc[k], c.row + kDr[k]};
      if (!step_allowed(costmap, c, nb)) continue;
      const std::size_t ni = g.index(nb);
      if (closed[ni]) continue;
      const double cand = cost_so_far[idx] + step_cost(costmap, c, nb, params.cost_weight);
      if (cand < cost_so_far[ni]) {
        cost_so_far[ni] = cand;
        parent[ni] = idx;
        open.push({cand + heuristic(nb), ni});
      }
    }
  }

  if (!closed[goal_idx]) {
    result.error = PlanError::NoPath;
    return result;
  }

  std::vector<std::size_t> chain;
  for (std::size_t i = goal_idx; i != n; i = parent[i]) chain.push_back(i);
  std::reverse(chain.begin(), chain.end());

  std::vector<Pose2D> wps;
  wps.reserve(chain.size() + 1);
  for (std::size_t i : chain) {
    const Point2 p = g.cell_to_world(g.cell_of(i));
    wps.push_back({p.x(), p.y(), 0.0});
  }
  wps.front() = start;
  if (wps.size() == 1) wps.push_back(goal);
  else wps.back() = goal;
  for (std::size_t i = 0; i + 1 < wps.size(); ++i)
    wps[i].theta = std::atan2(wps[i + 1].y - wps[i].y, wps[i + 1].x - wps[i].x);
  wps.back().theta = goal.theta;

  result.path = Path(std::move(wps));
  result.cost = cost_so_far[goal_idx];
  return result;
}

PlanComparison compare_plans(const Path& original, const Path& candidate, double level_of_consideration)
{
  const double lo = path_length(original);
  const double lc = path_length(candidate);
  return lc <= lo + level_of_consideration ? PlanComparison::AdoptCandidate : PlanComparison::PreferInteraction;
}

Path remaining_path(const Path& path, const Pose2D& robot)
{
  if (path.empty()) throw EmptyPathError("path has no waypoints");
  const std::size_t from = path.nearest_index(robot.position());
  return Path(std::vector<Pose2D>(path.waypoints().begin() + static_cast<std::ptrdiff_t>(from),
                                  path.waypoints().end()));
}

}  // namespace socnav
