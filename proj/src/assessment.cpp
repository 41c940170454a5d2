#include "socnav/assessment.hpp"

#include <algorithm>
#include <cmath>

#include "socnav/clustering.hpp"
#include "socnav/errors.hpp"

namespace socnav {

namespace {

constexpr double kTimeEps = 1e-9;
constexpr double kFrozenRetryPeriod = 1.0;

class Machine
{
public:
  Machine(const AssessmentState& s, double clock) : clock_(clock) { out.state = s; }

  void go(Phase to)
  {
    out.transitions.emplace_back(out.state.phase, to);
    out.state.phase = to;
    out.state.phase_entered_at = clock_;
  }

  void adopt(const Path& path, AdoptReason reason)
  {
    out.state.original_plan = path;
    out.state.active_plan = path;
    out.effects.push_back(AdoptPlan{path, reason});
  }

  void issue_ask(const SocialNavConfig& cfg)
  {
    AskEvent ask;
    ask.ask_id = out.state.next_ask_id++;
    ask.issued_at = clock_;
    ask.utterance = cfg.utterance;
    ask.target_cluster_mean = out.state.target_cluster_mean;
    ask.addressed = out.state.perceived;
    out.state.pending_ask = ask;
    ++out.state.asks_made;
    out.effects.push_back(IssueAsk{ask});
  }

  void resolve_ask(bool complied)
  {
    if (!out.state.pending_ask) return;
    AskEvent ask = *out.state.pending_ask;
    ask.resolved = AskResolution{complied, clock_};
    out.resolved_ask = ask;
    out.state.pending_ask.reset();
  }

  /// Back to Navigating on a fresh plan when one exists, else on the active plan.
  void resume(const std::function<PlanResult()>& replan, AdoptReason reason)
  {
    if (replan) {
      PlanResult r = replan();
      if (r.ok()) adopt(*r.path, reason);
    }
    go(Phase::Navigating);
    out.effects.push_back(ResumeMotion{});
  }

  StepOutput out;

private:
  double clock_;
};

void resolve_plan_failed(Machine& m, const AssessmentInputs& in, const SocialNavConfig& cfg)
{
  if (in.mode == Mode::Baseline) {
    m.go(Phase::Recovering);
    m.out.effects.push_back(StartRecovery{});
    return;
  }
  ClusterReport report = assess_clusters(in.scan_points, in.robot, cfg);
  const bool gate = report.gate_passed;
  if (gate) {
    // the mean that passed the gate is the one the ask addresses
    double best = std::numeric_limits<double>::infinity();
    for (const Point2& mean : report.means) {
      const double d = (mean - in.robot.position()).norm();
      if (d < best) {
        best = d;
        m.out.state.target_cluster_mean = mean;
      }
    }
  }
  m.out.cluster_report = std::move(report);
  if (gate) {
    m.out.state.perceived.clear();
    m.go(Phase::Perceiving);
  } else {
    m.go(Phase::Recovering);
    m.out.effects.push_back(StartRecovery{});
  }
}

void enter_exhausted(Machine& m, const SocialNavConfig& cfg)
{
  if (cfg.post_ask_policy.kind == PostAskPolicyKind::FreezeUntilClear) {
    m.out.state.frozen_after_asking = true;
    m.go(Phase::Frozen);
  } else {
    m.go(Phase::Aborted);
    m.out.effects.push_back(DeclareAbort{"asks exhausted"});
  }
}

}  // namespace

const char* to_string(Phase p)
{
  switch (p) {
    case Phase::Navigating: return "Navigating";
    case Phase::PlanFailed: return "PlanFailed";
    case Phase::Perceiving: return "Perceiving";
    case Phase::Comparing: return "Comparing";
    case Phase::Asking: return "Asking";
    case Phase::WaitingClearance: return "WaitingClearance";
    case Phase::Recovering: return "Recovering";
    case Phase::Frozen: return "Frozen";
    case Phase::GoalReached: return "GoalReached";
    case Phase::Aborted: return "Aborted";
  }
  return "?";
}

bool is_terminal(Phase p)
{
  return p == Phase::GoalReached || p == Phase::Aborted;
}

const char* to_string(AdoptReason r)
{
  switch (r) {
    case AdoptReason::Initial: return "initial";
    case AdoptReason::Candidate: return "candidate";
    case AdoptReason::Resume: return "resume";
    case AdoptReason::Recovery: return "recovery";
  }
  return "?";
}

AssessmentState initial_assessment(const Path& plan, double clock)
{
  AssessmentState s;
  s.phase = Phase::Navigating;
  s.phase_entered_at = clock;
  s.original_plan = plan;
  s.active_plan = plan;
  return s;
}

ClusterReport assess_clusters(std::span<const Point2> points, const Pose2D& robot, const SocialNavConfig& config)
{
  ClusterReport report;
  if (points.empty()) return report;
  const std::vector<Point2> pts(points.begin(), points.end());
  report.bandwidth = estimate_bandwidth(pts, config.meanshift_quantile);
  const auto clusters = mean_shift(pts, report.bandwidth);
  for (const auto& c : clusters) {
    report.means.push_back(c.mean);
    report.sizes.push_back(c.members.size());
  }
  report.nearest = nearest_cluster_distance(clusters, robot);
  report.gate_passed = *report.nearest < config.cluster_distance_gate;
  return report;
}

bool path_now_clear(const Costmap& costmap, const Pose2D& robot, const Path& active_plan, double lookahead,
                    double robot_radius)
{
  if (active_plan.empty()) return true;
  const OccupancyGrid& g = costmap.base();
  const std::size_t from = active_plan.nearest_index(robot.position());

  // polyline covering the next `lookahead` meters from the nearest waypoint
  std::vector<Point2> line{active_plan.waypoints()[from].position()};
  double acc = 0.0;
  for (std::size_t i = from + 1; i < active_plan.size() && acc < lookahead; ++i) {
    const Point2 p = active_plan.waypoints()[i].position();
    const double seg = (p - line.back()).norm();
    if (acc + seg > lookahead) {
      line.push_back(line.back() + (p - line.back()) * ((lookahead - acc) / seg));
      break;
    }
    acc += seg;
    line.push_back(p);
  }

  // sample the polyline densely and test the robot disc against obstacle cells
  const double step = 0.25 * g.resolution();
  const double r2 = robot_radius * robot_radius;
  auto disc_blocked = [&](const Point2& center) {
    const Point2 local = g.to_grid_frame(center);
    const double res = g.resolution();
    const int c0 = static_cast<int>(std::floor((local.x() - robot_radius) / res));
    const int c1 = static_cast<int>(std::floor((local.x() + robot_radius) / res));
    const int r0 = static_cast<int>(std::floor((local.y() - robot_radius) / res));
    const int r1 = static_cast<int>(std::floor((local.y() + robot_radius) / res));
    for (int r = r0; r <= r1; ++r)
      for (int c = c0; c <= c1; ++c) {
        const Cell cell{c, r};
        if (!g.in_bounds(cell) || !costmap.obstacle(cell)) continue;
        if (squared_distance_to_cell(g, local, cell) < r2) return true;
      }
    return false;
  };

  if (disc_blocked(line.front())) return false;
  for (std::size_t i = 1; i < line.size(); ++i) {
    const Point2 a = line[i - 1], b = line[i];
    const double len = (b - a).norm();
    const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
    for (int k = 1; k <= n; ++k)
      if (disc_blocked(a + (b - a) * (static_cast<double>(k) / n))) return false;
  }
  return true;
}

StepOutput decide_after_detection(const AssessmentState& state, const PlanResult& candidate, double clock,
                                  const Pose2D& robot, const SocialNavConfig& config)
{
  if (state.phase != Phase::Comparing)
    throw IllegalTransitionError(std::string("decide_after_detection in phase ") + to_string(state.phase));
  Machine m(state, clock);
  if (candidate.ok() && !state.original_plan.empty()) {
    const Path original = remaining_path(state.original_plan, robot);
    if (compare_plans(original, *candidate.path, config.level_of_consideration) ==
        PlanComparison::AdoptCandidate) {
      m.adopt(*candidate.path, AdoptReason::Candidate);
      m.out.state.asks_made = 0;  // the new route leaves the blocked corridor
      m.go(Phase::Navigating);
      m.out.effects.push_back(ResumeMotion{});
      return m.out;
    }
  }
  if (state.asks_made < config.max_asks) {
    m.go(Phase::Asking);
    m.issue_ask(config);
  } else {
    enter_exhausted(m, config);
  }
  return m.out;
}

StepOutput asking_step(const AssessmentState& state, double clock, bool path_clear, const SocialNavConfig& config,
                       const std::function<PlanResult()>& replan)
{
  Machine m(state, clock);
  if (state.phase == Phase::Asking) {
    m.go(Phase::WaitingClearance);
    return m.out;
  }
  if (state.phase != Phase::WaitingClearance)
    throw IllegalTransitionError(std::string("asking_step in phase ") + to_string(state.phase));

  if (path_clear) {
    m.resolve_ask(true);
    m.resume(replan, AdoptReason::Resume);
    return m.out;
  }
  const double waited = state.pending_ask ? clock - state.pending_ask->issued_at : clock - state.phase_entered_at;
  if (state.asks_made < config.max_asks) {
    if (waited >= config.reask_wait - kTimeEps) {
      m.resolve_ask(false);
      m.go(Phase::Asking);
      m.issue_ask(config);
    }
    return m.out;
  }
  if (config.post_ask_policy.kind == PostAskPolicyKind::FreezeUntilClear) {
    if (waited >= config.reask_wait - kTimeEps) {
      m.resolve_ask(false);
      enter_exhausted(m, config);
    }
  } else if (waited >= config.post_ask_policy.timeout_s - kTimeEps) {
    m.resolve_ask(false);
    enter_exhausted(m, config);
  }
  return m.out;
}

StepOutput check_goal(const AssessmentState& state, const Pose2D& robot, const Pose2D& goal, double clock,
                      const SocialNavConfig& config)
{
  Machine m(state, clock);
  if (is_terminal(state.phase)) return m.out;
  if (distance(robot, goal) <= config.goal_xy_tolerance) {
    m.resolve_ask(true);
    m.out.state.asks_made = 0;
    m.go(Phase::GoalReached);
    m.out.effects.push_back(DeclareGoal{});
  }
  return m.out;
}

StepOutput assess_step(const AssessmentState& state, const AssessmentInputs& in, const SocialNavConfig& cfg)
{
  if (is_terminal(state.phase))
    throw TerminalStateError(std::string("assessment already terminal: ") + to_string(state.phase));
  if (in.clock < state.phase_entered_at - kTimeEps) throw ClockRegressionError("assessment clock went backwards");

  auto needs_costmap = [&]() {
    if (!in.costmap) throw IllegalTransitionError("assessment input lacks a costmap");
    return in.costmap;
  };

  Machine m(state, in.clock);
  switch (state.phase) {
    case Phase::Navigating:
      if (!in.plan_failure) break;
      m.go(Phase::PlanFailed);
      m.out.effects.push_back(StopMotion{});
      resolve_plan_failed(m, in, cfg);
      break;

    case Phase::PlanFailed:
      resolve_plan_failed(m, in, cfg);
      break;

    case Phase::Perceiving: {
      if (in.mode == Mode::Baseline) {
        m.go(Phase::Recovering);
        m.out.effects.push_back(StartRecovery{});
        break;
      }
      if (!in.detections.empty()) {
        m.out.accepted_detections.assign(in.detections.begin(), in.detections.end());
        for (const Detection& d : in.detections)
          if (std::find(m.out.state.perceived.begin(), m.out.state.perceived.end(), d.pedestrian_id) ==
              m.out.state.perceived.end())
            m.out.state.perceived.push_back(d.pedestrian_id);
        m.go(Phase::Comparing);
      } else if (in.clock - state.phase_entered_at >= cfg.perception_window_t - kTimeEps) {
        m.go(Phase::Recovering);
        m.out.effects.push_back(StartRecovery{});
      }
      break;
    }

    case Phase::Comparing: {
      const PlanResult candidate = in.replan ? in.replan() : PlanResult{std::nullopt, 0.0, PlanError::NoPath};
      return decide_after_detection(state, candidate, in.clock, in.robot, cfg);
    }

    case Phase::Asking:
    case Phase::WaitingClearance: {
      const bool clear = state.phase == Phase::WaitingClearance &&
                         path_now_clear(*needs_costmap(), in.robot, state.active_plan, cfg.path_clear_lookahead,
                                        cfg.robot_radius);
      return asking_step(state, in.clock, clear, cfg, in.replan);
    }

    case Phase::Recovering:
      if (!in.recovery_complete) break;
      if (PlanResult r = in.replan ? in.replan() : PlanResult{}; r.ok()) {
        m.adopt(*r.path, AdoptReason::Recovery);
        m.go(Phase::Navigating);
        m.out.effects.push_back(ResumeMotion{});
      } else {
        m.out.state.frozen_after_asking = false;
        m.out.state.last_replan_attempt = in.clock;
        m.go(Phase::Frozen);
      }
      break;

    case Phase::Frozen:
      if (state.frozen_after_asking) {
        if (path_now_clear(*needs_costmap(), in.robot, state.active_plan, cfg.path_clear_lookahead,
                           cfg.robot_radius)) {
          m.out.state.frozen_after_asking = false;
          m.resume(in.replan, AdoptReason::Resume);
        }
      } else if (in.clock - state.last_replan_attempt >= kFrozenRetryPeriod - kTimeEps) {
        m.out.state.last_replan_attempt = in.clock;
        if (PlanResult r = in.replan ? in.replan() : PlanResult{}; r.ok()) {
          m.adopt(*r.path, AdoptReason::Recovery);
          m.go(Phase::Navigating);
          m.out.effects.push_back(ResumeMotion{});
        }
      }
      break;

    case Phase::GoalReached:
    case Phase::Aborted:
      break;
  }
  return m.out;
}

}  // namespace socnav
