#include "socnav/simulation.hpp"

#include <algorithm>
#include <cmath>

#include "socnav/errors.hpp"
#include "socnav/global_planner.hpp"

namespace socnav {

using nlohmann::json;

namespace {

constexpr double kTimeEps = 1e-9;

json points_json(std::span<const Point2> pts)
{
  json out = json::array();
  for (const Point2& p : pts) out.push_back({p.x(), p.y()});
  return out;
}

json path_json(const Path& path)
{
  json out = json::array();
  for (const Pose2D& p : path.waypoints()) out.push_back({p.x, p.y});
  return out;
}

json pose_json(const Pose2D& p)
{
  return {{"x", p.x}, {"y", p.y}, {"theta", p.theta}};
}

const char* mode_name(PedestrianMode m)
{
  switch (m) {
    case PedestrianMode::Idle: return "idle";
    case PedestrianMode::Yielding: return "yielding";
    case PedestrianMode::Moving: return "moving";
  }
  return "?";
}

const char* policy_name(const PedestrianPolicy& p)
{
  switch (p.index()) {
    case 0: return "static";
    case 1: return "compliant";
    case 2: return "waypoints";
    default: return "external";
  }
}

json ask_json(const AskEvent& a)
{
  json j = {{"ask_id", a.ask_id},
            {"issued_at", a.issued_at},
            {"utterance", a.utterance},
            {"target_cluster_mean", {a.target_cluster_mean.x(), a.target_cluster_mean.y()}},
            {"addressed", a.addressed}};
  if (a.resolved) j["resolved"] = {{"complied", a.resolved->complied}, {"at", a.resolved->at}};
  return j;
}

json cluster_json(const ClusterReport& r)
{
  json j = {{"means", points_json(r.means)},
            {"sizes", r.sizes},
            {"bandwidth", r.bandwidth},
            {"gate_passed", r.gate_passed}};
  j["nearest"] = r.nearest ? json(*r.nearest) : json(nullptr);
  return j;
}

json detection_json(const Detection& d)
{
  return {{"pedestrian_id", d.pedestrian_id},
          {"bbox_width", d.bbox_width},
          {"bearing", d.bearing},
          {"distance", d.distance},
          {"timestamp", d.timestamp}};
}

void emit(SimState& sim, std::string kind, json payload)
{
  sim.event_log.push_back({sim.clock, sim.tick, std::move(kind), std::move(payload)});
}

DwaParams dwa_params(const SocialNavConfig& cfg)
{
  DwaParams p;
  p.robot_radius = cfg.robot_radius;
  return p;
}

PedestrianState& find_ped(SimState& sim, const std::string& id)
{
  for (PedestrianState& p : sim.pedestrians)
    if (p.id == id) return p;
  throw ValidationError("unknown pedestrian '" + id + "'");
}

void update_proximity(SimState& sim)
{
  for (const PedestrianState& p : sim.pedestrians) {
    const double d = (p.pose.position() - sim.robot.pose.position()).norm();
    if (!sim.metrics.min_pedestrian_distance || d < *sim.metrics.min_pedestrian_distance)
      sim.metrics.min_pedestrian_distance = d;
  }
}

void maybe_snapshot(SimState& sim)
{
  if (sim.clock + kTimeEps < sim.next_snapshot_at) return;
  emit(sim, "snapshot", snapshot(sim));
  sim.next_snapshot_at += sim.scenario->config.trace_snapshot_period;
}

/// Applies the assessment output: trace events in a fixed order, then effects.
void apply_assessment(SimState& sim, StepOutput&& out, VelocityCommand& cmd)
{
  const Scenario& sc = *sim.scenario;
  if (out.cluster_report) {
    emit(sim, "cluster_report", cluster_json(*out.cluster_report));
    sim.last_cluster_report = std::move(out.cluster_report);
  }
  for (const Detection& d : out.accepted_detections) emit(sim, "detection", detection_json(d));
  if (out.resolved_ask) emit(sim, "ask_resolved", ask_json(*out.resolved_ask));

  for (auto& [from, to] : out.transitions) {
    emit(sim, "phase", {{"from", to_string(from)}, {"to", to_string(to)}});
    if (to == Phase::Frozen) emit(sim, "freeze", {{"after_asking", out.state.frozen_after_asking}});
    if (from == Phase::Recovering && sim.rotation) {
      emit(sim, "recovery", {{"stage", "complete"}, {"rotated", sim.rotation->rotated()}});
      sim.rotation.reset();
    }
  }

  sim.assessment = std::move(out.state);
  for (Effect& e : out.effects) {
    std::visit(
        [&](auto& eff) {
          using T = std::decay_t<decltype(eff)>;
          if constexpr (std::is_same_v<T, IssueAsk>) {
            ++sim.metrics.n_asks;
            emit(sim, "ask", ask_json(eff.ask));
            on_ask(sim.pedestrians, {eff.ask.ask_id, eff.ask.issued_at}, sim.robot.pose, sc.goal().position(),
                   sim.rng, sc.config.hear_radius);
          } else if constexpr (std::is_same_v<T, AdoptPlan>) {
            emit(sim, "plan_adopted",
                 {{"reason", to_string(eff.reason)}, {"length", eff.path.length()}, {"path", path_json(eff.path)}});
            sim.failure_tracker.reset();
          } else if constexpr (std::is_same_v<T, StartRecovery>) {
            sim.costmap = clear_costmap(sim.costmap);
            sim.rotation = RotateInPlace(dwa_params(sc.config).omega_max);
            emit(sim, "recovery", {{"stage", "start"}});
            cmd = {};
          } else if constexpr (std::is_same_v<T, StopMotion>) {
            cmd = {};
          } else if constexpr (std::is_same_v<T, ResumeMotion>) {
            sim.failure_tracker.reset();
          } else if constexpr (std::is_same_v<T, DeclareGoal>) {
            sim.metrics.success = sim.metrics.n_collisions == 0;
            sim.metrics.time_to_goal = sim.clock;
            emit(sim, "goal", {{"success", sim.metrics.success}});
          } else if constexpr (std::is_same_v<T, DeclareAbort>) {
            emit(sim, "abort", {{"reason", eff.reason}});
          }
        },
        e);
  }
}

}  // namespace

SimState make_sim(const Scenario& scenario)
{
  return make_sim(std::make_shared<const Scenario>(scenario));
}

SimState make_sim(std::shared_ptr<const Scenario> scenario)
{
  const SocialNavConfig& cfg = scenario->config;
  SimState sim;
  sim.scenario = scenario;
  sim.robot.pose = scenario->robot_start;
  sim.pedestrians = initial_states(scenario->pedestrians);
  sim.costmap = inflate(scenario->map, cfg.robot_radius, cfg.inflation_radius);
  sim.rng = Rng(scenario->seed);
  sim.failure_tracker = PlanFailureTracker(cfg.plan_fail_grace);

  // the robot does not know about the people when it plans the first route
  PlanResult initial = plan_global(sim.costmap, scenario->robot_start, scenario->goal());
  if (initial.ok()) {
    sim.assessment = initial_assessment(*initial.path, 0.0);
    emit(sim, "plan_adopted",
         {{"reason", to_string(AdoptReason::Initial)},
          {"length", initial.path->length()},
          {"path", path_json(*initial.path)}});
  } else {
    sim.assessment.phase = Phase::Aborted;
    emit(sim, "abort", {{"reason", std::string("initial plan: ") + to_string(initial.error)}});
  }
  update_proximity(sim);
  maybe_snapshot(sim);
  return sim;
}

bool is_terminal(const SimState& sim)
{
  return is_terminal(sim.assessment.phase);
}

Pose2D integrate(const Pose2D& pose, const VelocityCommand& cmd, double dt)
{
  return {pose.x + cmd.vx * std::cos(pose.theta) * dt, pose.y + cmd.vx * std::sin(pose.theta) * dt,
          normalize_angle(pose.theta + cmd.omega * dt)};
}

void apply_external(SimState& sim, const ExternalCommand& cmd)
{
  const Scenario& sc = *sim.scenario;
  if (const auto* set = std::get_if<SetPedPose>(&cmd)) {
    PedestrianState& p = find_ped(sim, set->ped_id);
    const auto cell = sc.map.world_to_cell(set->pose.position());
    if (!cell || sc.map.occupied(*cell)) throw ValidationError("pose of '" + set->ped_id + "' is not on a free cell");
    p.policy = ExternalPolicy{};
    p.mode = PedestrianMode::Idle;
    p.pose = make_pose(set->pose.x, set->pose.y, set->pose.theta);
    emit(sim, "external", {{"cmd", "set_ped_pose"}, {"ped_id", p.id}, {"pose", pose_json(p.pose)}});
    return;
  }
  const auto& resolve = std::get<ResolveAsk>(cmd);
  PedestrianState& p = find_ped(sim, resolve.ped_id);
  if (!sim.assessment.pending_ask) throw ValidationError("no ask is pending");
  const int ask_id = sim.assessment.pending_ask->ask_id;
  const double sidestep = sidestep_of(p);
  p.policy = ExternalPolicy{};
  p.mode = PedestrianMode::Idle;
  if (!p.heard(ask_id)) p.heard_asks.push_back(ask_id);
  if (resolve.comply) schedule_yield(p, sim.robot.pose, sc.goal().position(), sim.clock, sidestep);
  emit(sim, "external",
       {{"cmd", "resolve_ask"}, {"ped_id", p.id}, {"comply", resolve.comply}, {"ask_id", ask_id}});
}

SimState step(SimState sim, Mode mode, std::span<const ExternalCommand> external_cmds)
{
  if (is_terminal(sim)) throw TerminalStateError("simulation already finished");
  const Scenario& sc = *sim.scenario;
  const SocialNavConfig& cfg = sc.config;
  const double dt = cfg.dt;

  ++sim.tick;
  sim.clock = static_cast<double>(sim.tick) * dt;

  for (const ExternalCommand& c : external_cmds) apply_external(sim, c);

  step_pedestrians(sim.pedestrians, sc.map, dt, sim.clock);

  sim.scan = raycast_scan(sc.map, sim.pedestrians, sim.robot.pose, cfg.laser, sim.clock);
  sim.costmap = apply_scan(sim.costmap, sim.scan, sim.robot.pose);
  sim.scan_points = scan_to_points(sim.scan, sim.robot.pose);

  sim.detections.clear();
  if (cfg.detector_period_ticks > 0 && sim.tick % cfg.detector_period_ticks == 0) {
    auto dets = detect_people(cfg.camera, sc.map, sim.pedestrians, sim.robot.pose, cfg.bbox_width_gate, sim.clock);
    for (Detection& d : dets)
      if (cfg.detection_miss_probability <= 0.0 || !sim.rng.bernoulli(cfg.detection_miss_probability))
        sim.detections.push_back(std::move(d));
  }

  VelocityCommand cmd{};
  std::optional<PlanFailure> failure;
  if (sim.assessment.phase == Phase::Navigating) {
    const DwaResult r = dwa_select(sim.costmap, sim.robot.pose, sim.robot.vel, sim.assessment.active_plan,
                                   dwa_params(cfg));
    cmd = r.command.value_or(VelocityCommand{});
    failure = sim.failure_tracker.update(sim.clock, !r.command.has_value(), sim.robot.pose);
    if (failure)
      emit(sim, "plan_failure",
           {{"first_failed_at", failure->first_failed_at},
            {"duration", failure->duration},
            {"robot", pose_json(failure->robot_pose)}});
  }

  AssessmentInputs in;
  in.clock = sim.clock;
  in.mode = mode;
  in.plan_failure = failure;
  in.scan_points = sim.scan_points;
  in.detections = sim.detections;
  in.costmap = &sim.costmap;
  in.robot = sim.robot.pose;
  in.goal = sc.goal();
  in.recovery_complete = sim.rotation && sim.rotation->complete();
  in.replan = [&sim, &sc]() {
    ++sim.metrics.n_replans;
    return plan_global(sim.costmap, sim.robot.pose, sc.goal());
  };
  apply_assessment(sim, assess_step(sim.assessment, in, cfg), cmd);

  if (sim.assessment.phase == Phase::Recovering && sim.rotation) {
    cmd = sim.rotation->next(dt).value_or(VelocityCommand{});
  } else if (sim.assessment.phase != Phase::Navigating) {
    cmd = {};
  }

  const Pose2D before = sim.robot.pose;
  sim.robot.pose = integrate(before, cmd, dt);
  sim.robot.vel = cmd;
  sim.metrics.executed_path_length += distance(before, sim.robot.pose);

  if (!is_terminal(sim)) apply_assessment(sim, check_goal(sim.assessment, sim.robot.pose, sc.goal(), sim.clock, cfg), cmd);

  std::vector<std::string> contacts;
  for (const PedestrianState& p : sim.pedestrians)
    if ((p.pose.position() - sim.robot.pose.position()).norm() < cfg.robot_radius + p.radius) contacts.push_back(p.id);
  if (!disc_is_free(sc.map, sim.robot.pose.position(), cfg.robot_radius)) contacts.emplace_back("#map");
  for (const std::string& c : contacts) {
    if (std::find(sim.in_contact.begin(), sim.in_contact.end(), c) != sim.in_contact.end()) continue;
    ++sim.metrics.n_collisions;
    sim.metrics.success = false;
    emit(sim, "collision", {{"with", c}, {"robot", pose_json(sim.robot.pose)}});
  }
  sim.in_contact = std::move(contacts);

  update_proximity(sim);
  const Phase ph = sim.assessment.phase;
  if (ph == Phase::Frozen || (ph == Phase::WaitingClearance && cmd.vx == 0.0 && cmd.omega == 0.0))
    sim.metrics.freeze_time += dt;
  if (!sim.metrics.success) sim.metrics.time_to_goal = sim.clock;
  maybe_snapshot(sim);
  return sim;
}

RunResult run(const Scenario& scenario, Mode mode, double max_time)
{
  SimState sim = make_sim(scenario);
  while (!is_terminal(sim) && sim.clock + kTimeEps < max_time) sim = step(std::move(sim), mode);
  if (!is_terminal(sim)) emit(sim, "timeout", {{"max_time", max_time}});
  return {sim.metrics, std::move(sim.event_log)};
}

json snapshot(const SimState& sim)
{
  const AssessmentState& a = sim.assessment;
  json peds = json::array();
  for (const PedestrianState& p : sim.pedestrians)
    peds.push_back({{"id", p.id},
                    {"x", p.pose.x},
                    {"y", p.pose.y},
                    {"theta", p.pose.theta},
                    {"radius", p.radius},
                    {"mode", mode_name(p.mode)},
                    {"policy", policy_name(p.policy)}});
  json dets = json::array();
  for (const Detection& d : sim.detections) dets.push_back(detection_json(d));

  json j = {
      {"clock", sim.clock},
      {"tick", sim.tick},
      {"phase", to_string(a.phase)},
      {"robot", {{"pose", pose_json(sim.robot.pose)}, {"vel", {{"vx", sim.robot.vel.vx}, {"omega", sim.robot.vel.omega}}}}},
      {"original_path", path_json(a.original_plan)},
      {"active_path", path_json(a.active_plan)},
      {"laser_points", points_json(sim.scan_points)},
      {"cluster_means", sim.last_cluster_report ? points_json(sim.last_cluster_report->means) : json::array()},
      {"detections", dets},
      {"pedestrians", peds},
      {"asks_made", a.asks_made},
  };
  if (a.pending_ask) {
    j["pending_ask"] = {{"ask_id", a.pending_ask->ask_id},
                        {"utterance", a.pending_ask->utterance},
                        {"candidate_ped_ids", a.pending_ask->addressed}};
  } else {
    j["pending_ask"] = nullptr;
  }
  return j;
}

json to_json(const Metrics& m)
{
  return {{"success", m.success},
          {"time_to_goal", m.time_to_goal},
          {"executed_path_length", m.executed_path_length},
          {"n_asks", m.n_asks},
          {"n_replans", m.n_replans},
          {"freeze_time", m.freeze_time},
          {"min_pedestrian_distance", m.min_pedestrian_distance ? json(*m.min_pedestrian_distance) : json(nullptr)},
          {"n_collisions", m.n_collisions}};
}

json to_json(const TraceEvent& e)
{
  return {{"t", e.t}, {"tick", e.tick}, {"kind", e.kind}, {"payload", e.payload}};
}

std::string to_jsonl(const std::vector<TraceEvent>& trace)
{
  std::string out;
  for (const TraceEvent& e : trace) {
    out += to_json(e).dump();
    out += '\n';
  }
  return out;
}

}  // namespace socnav
