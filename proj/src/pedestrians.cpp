#include "socnav/pedestrians.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace socnav {

bool PedestrianState::heard(int ask_id) const
{
  return std::find(heard_asks.begin(), heard_asks.end(), ask_id) != heard_asks.end();
}

std::vector<PedestrianState> initial_states(const std::vector<PedestrianSpec>& specs)
{
  std::vector<PedestrianState> out;
  out.reserve(specs.size());
  for (const PedestrianSpec& s : specs) {
    PedestrianState p;
    p.id = s.id;
    p.pose = s.start;
    p.radius = s.radius;
    p.policy = s.policy;
    p.relay = s.relay;
    if (const auto* w = std::get_if<WaypointsPolicy>(&s.policy); w && !w->waypoints.empty() && w->speed > 0.0)
      p.mode = PedestrianMode::Moving;
    out.push_back(std::move(p));
  }
  return out;
}

Point2 sidestep_direction(const Pose2D& robot, const Point2& goal, const Point2& ped)
{
  Point2 u = goal - robot.position();
  if (u.norm() < 1e-9) u = Point2(std::cos(robot.theta), std::sin(robot.theta));
  u.normalize();
  const Point2 left(-u.y(), u.x());
  return left.dot(ped - robot.position()) < 0.0 ? Point2(-left) : left;
}

double sidestep_of(const PedestrianState& ped)
{
  if (const auto* c = std::get_if<CompliantPolicy>(&ped.policy)) return c->sidestep;
  if (ped.relay) return ped.relay->sidestep;
  return 1.0;
}

void schedule_yield(PedestrianState& ped, const Pose2D& robot, const Point2& goal, double at, double sidestep)
{
  ped.mode = PedestrianMode::Yielding;
  ped.yield_until = at;
  ped.yield_target = ped.pose.position() + sidestep * sidestep_direction(robot, goal, ped.pose.position());
  ped.has_yielded = true;
}

std::vector<std::string> on_ask(std::vector<PedestrianState>& peds, const AskNotice& ask, const Pose2D& robot,
                                const Point2& goal, Rng& rng, double hear_radius)
{
  std::vector<std::string> complied;
  std::vector<std::size_t> yielders;  // primary compliers, in order
  std::vector<double> delays;

  for (std::size_t i = 0; i < peds.size(); ++i) {
    PedestrianState& p = peds[i];
    if (p.heard(ask.ask_id)) continue;
    if ((p.pose.position() - robot.position()).norm() > hear_radius) continue;
    p.heard_asks.push_back(ask.ask_id);
    const auto* c = std::get_if<CompliantPolicy>(&p.policy);
    if (!c) continue;
    ++p.asks_heard;
    if (p.has_yielded || p.asks_heard < c->asks_needed) continue;
    if (!rng.bernoulli(c->p_comply)) continue;
    schedule_yield(p, robot, goal, ask.issued_at + c->delay, c->sidestep);
    complied.push_back(p.id);
    yielders.push_back(i);
    delays.push_back(c->delay);
  }

  if (yielders.empty()) return complied;
  for (std::size_t i = 0; i < peds.size(); ++i) {
    PedestrianState& p = peds[i];
    if (!p.relay || p.has_yielded) continue;
    if (!std::holds_alternative<StaticPolicy>(p.policy) && !std::holds_alternative<CompliantPolicy>(p.policy))
      continue;
    for (std::size_t k = 0; k < yielders.size(); ++k) {
      const double d = (peds[yielders[k]].pose.position() - p.pose.position()).norm();
      if (d > p.relay->radius) continue;
      if (rng.bernoulli(p.relay->p_relay)) {
        schedule_yield(p, robot, goal, ask.issued_at + delays[k], sidestep_of(p));
        complied.push_back(p.id);
      }
      break;  // one relay draw per bystander, triggered by the first complier in range
    }
  }
  return complied;
}

bool disc_is_free(const OccupancyGrid& map, const Point2& center, double radius)
{
  const double res = map.resolution();
  const Point2 local = map.to_grid_frame(center);
  const int c0 = static_cast<int>(std::floor((local.x() - radius) / res));
  const int c1 = static_cast<int>(std::floor((local.x() + radius) / res));
  const int r0 = static_cast<int>(std::floor((local.y() - radius) / res));
  const int r1 = static_cast<int>(std::floor((local.y() + radius) / res));
  const double r2 = radius * radius;
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c) {
      const Cell cell{c, r};
      if (squared_distance_to_cell(map, local, cell) >= r2) continue;
      if (!map.in_bounds(cell) || map.occupied(cell)) return false;
    }
  return true;
}

std::optional<Point2> clamp_to_free(const OccupancyGrid& map, const Point2& target, double radius)
{
  if (disc_is_free(map, target, radius)) return target;
  const double reach = 2.0 * radius;
  const double res = map.resolution();
  const Point2 local = map.to_grid_frame(target);
  const int c0 = static_cast<int>(std::floor((local.x() - reach) / res));
  const int c1 = static_cast<int>(std::floor((local.x() + reach) / res));
  const int r0 = static_cast<int>(std::floor((local.y() - reach) / res));
  const int r1 = static_cast<int>(std::floor((local.y() + reach) / res));

  std::optional<Point2> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (int r = r0; r <= r1; ++r)  // row-major scan: index order, so strict < keeps the lowest index
    for (int c = c0; c <= c1; ++c) {
      const Cell cell{c, r};
      if (!map.in_bounds(cell)) continue;
      const Point2 center = map.cell_to_world(cell);
      const double d = (center - target).norm();
      if (d > reach || d >= best_d) continue;
      if (!disc_is_free(map, center, radius)) continue;
      best = center;
      best_d = d;
    }
  return best;
}

void step_pedestrians(std::vector<PedestrianState>& peds, const OccupancyGrid& map, double dt, double clock)
{
  for (PedestrianState& p : peds) {
    if (p.mode == PedestrianMode::Yielding) {
      if (clock + 1e-9 < p.yield_until) continue;
      if (auto target = clamp_to_free(map, p.yield_target, p.radius)) {
        p.pose.x = target->x();
        p.pose.y = target->y();
      }
      p.mode = PedestrianMode::Idle;
      continue;
    }
    if (p.mode != PedestrianMode::Moving) continue;
    const auto* w = std::get_if<WaypointsPolicy>(&p.policy);
    if (!w || w->waypoints.empty()) {
      p.mode = PedestrianMode::Idle;
      continue;
    }
    double budget = w->speed * dt;
    Point2 pos = p.pose.position();
    // bounded so a loop of coincident waypoints cannot spin forever
    for (std::size_t guard = 0; budget > 0.0 && p.waypoint_index < w->waypoints.size() &&
                                guard <= 2 * w->waypoints.size();
         ++guard) {
      const Point2 wp = w->waypoints[p.waypoint_index].position();
      const Point2 delta = wp - pos;
      const double d = delta.norm();
      if (d <= budget) {
        pos = wp;
        budget -= d;
        ++p.waypoint_index;
        if (p.waypoint_index == w->waypoints.size() && w->loop) p.waypoint_index = 0;
      } else {
        pos += delta * (budget / d);
        budget = 0.0;
      }
    }
    if (disc_is_free(map, pos, p.radius)) {
      const Point2 heading = pos - p.pose.position();
      if (heading.norm() > 0.0) p.pose.theta = std::atan2(heading.y(), heading.x());
      p.pose.x = pos.x();
      p.pose.y = pos.y();
    }
    if (p.waypoint_index >= w->waypoints.size()) p.mode = PedestrianMode::Idle;
  }
}

}  // namespace socnav
