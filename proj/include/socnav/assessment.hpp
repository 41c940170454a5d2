#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "socnav/config.hpp"
#include "socnav/costmap.hpp"
#include "socnav/global_planner.hpp"
#include "socnav/local_planner.hpp"
#include "socnav/path.hpp"
#include "socnav/sensing.hpp"

namespace socnav {

enum class Phase {
  Navigating,
  PlanFailed,
  Perceiving,
  Comparing,
  Asking,
  WaitingClearance,
  Recovering,
  Frozen,
  GoalReached,
  Aborted,
};

const char* to_string(Phase p);
bool is_terminal(Phase p);

struct AskResolution
{
  bool complied = false;
  double at = 0.0;
};

struct AskEvent
{
  int ask_id = 0;
  double issued_at = 0.0;
  std::string utterance;
  Point2 target_cluster_mean = Point2::Zero();
  std::vector<std::string> addressed;  // pedestrians seen during perception
  std::optional<AskResolution> resolved;
};

enum class AdoptReason { Initial, Candidate, Resume, Recovery };

const char* to_string(AdoptReason r);

struct IssueAsk { AskEvent ask; };
struct AdoptPlan { Path path; AdoptReason reason = AdoptReason::Initial; };
struct StartRecovery {};
struct StopMotion {};
struct ResumeMotion {};
struct DeclareGoal {};
struct DeclareAbort { std::string reason; };

using Effect = std::variant<IssueAsk, AdoptPlan, StartRecovery, StopMotion, ResumeMotion,
                            DeclareGoal, DeclareAbort>;

struct AssessmentState
{
  Phase phase = Phase::Navigating;
  double phase_entered_at = 0.0;
  int asks_made = 0;
  Path original_plan;
  Path active_plan;
  std::optional<AskEvent> pending_ask;

  int next_ask_id = 1;
  Point2 target_cluster_mean = Point2::Zero();
  std::vector<std::string> perceived;
  bool frozen_after_asking = false;
  double last_replan_attempt = -std::numeric_limits<double>::infinity();
};

AssessmentState initial_assessment(const Path& plan, double clock = 0.0);

struct ClusterReport
{
  std::vector<Point2> means;
  std::vector<std::size_t> sizes;
  double bandwidth = 0.0;
  std::optional<double> nearest;  // nullopt when the scan had no returns
  bool gate_passed = false;
};

struct AssessmentInputs
{
  double clock = 0.0;
  Mode mode = Mode::Social;
  std::optional<PlanFailure> plan_failure;
  std::span<const Point2> scan_points;  // world frame
  std::span<const Detection> detections;
  const Costmap* costmap = nullptr;
  Pose2D robot{};
  Pose2D goal{};
  bool recovery_complete = false;
  /// Plans from the robot's current pose to the goal on the current costmap.
  std::function<PlanResult()> replan;
};

struct StepOutput
{
  AssessmentState state;
  std::vector<Effect> effects;
  std::vector<std::pair<Phase, Phase>> transitions;
  std::optional<ClusterReport> cluster_report;
  std::vector<Detection> accepted_detections;
  std::optional<AskEvent> resolved_ask;
};

/// Clusters the scan returns and applies the distance gate.
ClusterReport assess_clusters(std::span<const Point2> points, const Pose2D& robot,
                              const SocialNavConfig& config);

/// One evaluation of the situation-assessment machine.
///
/// Transitions: Navigating -> PlanFailed on a plan failure, resolved on the
/// same snapshot to Perceiving (a cluster mean is inside the distance gate) or
/// Recovering; Perceiving -> Comparing on the first gated detection, or
/// Recovering once the window expires; Comparing -> Navigating (candidate
/// adopted) or Asking; Asking -> WaitingClearance; WaitingClearance ->
/// Navigating, Asking, Frozen or Aborted; Recovering -> Navigating or Frozen;
/// Frozen -> Navigating once unblocked. Baseline mode skips perception and
/// interaction: a plan failure goes straight to recovery.
StepOutput assess_step(const AssessmentState& state, const AssessmentInputs& inputs,
                       const SocialNavConfig& config);

/// Comparing phase: adopt a candidate that is no longer than the remaining
/// original plan plus the level of consideration, otherwise ask.
StepOutput decide_after_detection(const AssessmentState& state, const PlanResult& candidate,
                                  double clock, const Pose2D& robot, const SocialNavConfig& config);

/// Asking / WaitingClearance phases.
StepOutput asking_step(const AssessmentState& state, double clock, bool path_clear,
                       const SocialNavConfig& config,
                       const std::function<PlanResult()>& replan = {});

/// No lethal cell within robot_radius of the next `lookahead` meters of the plan.
bool path_now_clear(const Costmap& costmap, const Pose2D& robot, const Path& active_plan,
                    double lookahead, double robot_radius);

/// Any non-terminal phase -> GoalReached when the robot is within tolerance.
StepOutput check_goal(const AssessmentState& state, const Pose2D& robot, const Pose2D& goal,
                      double clock, const SocialNavConfig& config);

}  // namespace socnav
