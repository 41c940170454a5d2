#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "socnav/errors.hpp"
#include "socnav/simulation.hpp"
#include "support/fixtures.hpp"

using namespace socnav;

namespace {

std::vector<const TraceEvent*> of_kind(const std::vector<TraceEvent>& trace, const std::string& kind)
{
  std::vector<const TraceEvent*> out;
  for (const auto& e : trace)
    if (e.kind == kind) out.push_back(&e);
  return out;
}

std::ptrdiff_t first_index(const std::vector<TraceEvent>& trace, const std::string& kind)
{
  const auto it = std::find_if(trace.begin(), trace.end(), [&](const TraceEvent& e) { return e.kind == kind; });
  return it == trace.end() ? -1 : it - trace.begin();
}

// Seconds spent at rest in Frozen or WaitingClearance, rebuilt from phase events.
double freeze_from_trace(const std::vector<TraceEvent>& trace, double dt)
{
  std::int64_t last_tick = 0;
  for (const auto& e : trace) last_tick = std::max(last_tick, e.tick);
  std::vector<std::pair<std::int64_t, std::string>> phase_at;  // end-of-tick phase changes
  for (const auto& e : trace) {
    if (e.kind != "phase") continue;
    const std::string to = e.payload.at("to");
    if (!phase_at.empty() && phase_at.back().first == e.tick)
      phase_at.back().second = to;
    else
      phase_at.emplace_back(e.tick, to);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < phase_at.size(); ++i) {
    const std::string& p = phase_at[i].second;
    if (p != "Frozen" && p != "WaitingClearance") continue;
    const std::int64_t until = i + 1 < phase_at.size() ? phase_at[i + 1].first : last_tick + 1;
    total += static_cast<double>(until - phase_at[i].first) * dt;
  }
  return total;
}

}  // namespace

TEST(Integrate, ForwardEuler)
{
  const Pose2D p = integrate({1, 2, std::numbers::pi / 2}, {0.5, 1.0}, 0.1);
  EXPECT_NEAR(p.x, 1.0, 1e-12);
  EXPECT_NEAR(p.y, 2.05, 1e-12);
  EXPECT_NEAR(p.theta, std::numbers::pi / 2 + 0.1, 1e-12);
  EXPECT_NEAR(integrate({0, 0, 3.1}, {0, 1.0}, 0.1).theta, 3.2 - 2 * std::numbers::pi, 1e-12);
}

TEST(Simulation, StartingAtTheGoalFinishesOnTheFirstTick)
{
  Scenario sc = fixtures::scenario("a_free_corridor");
  sc.robot_start = {13.9, 2.0, 0.0};
  SimState sim = step(make_sim(sc), Mode::Social);
  EXPECT_EQ(sim.assessment.phase, Phase::GoalReached);
  EXPECT_TRUE(sim.metrics.success);
  EXPECT_DOUBLE_EQ(sim.metrics.time_to_goal, 0.05);
  EXPECT_THROW(step(sim, Mode::Social), TerminalStateError);
}

TEST(Simulation, ClockIsTickTimesDt)
{
  SimState sim = make_sim(fixtures::scenario("c_blocked_sole_corridor"));
  for (int k = 1; k <= 200; ++k) {
    sim = step(std::move(sim), Mode::Social);
    ASSERT_EQ(sim.tick, k);
    ASSERT_EQ(sim.clock, k * 0.05);
  }
}

TEST(Simulation, PlacingAPedestrianOnTheRobotIsACollision)
{
  SimState sim = make_sim(fixtures::scenario("c_blocked_sole_corridor"));
  const std::vector<ExternalCommand> cmds{SetPedPose{"p1", {1.8, 3.0, 0.0}}};
  sim = step(std::move(sim), Mode::Social, cmds);
  EXPECT_EQ(sim.metrics.n_collisions, 1);
  EXPECT_FALSE(sim.metrics.success);
  const auto hits = of_kind(sim.event_log, "collision");
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0]->payload.at("with"), "p1");
  // still touching on the next tick is the same contact
  sim = step(std::move(sim), Mode::Social);
  EXPECT_EQ(sim.metrics.n_collisions, 1);
}

TEST(Simulation, ExternalCommandValidation)
{
  SimState sim = make_sim(fixtures::scenario("c_blocked_sole_corridor"));
  EXPECT_THROW(apply_external(sim, SetPedPose{"nobody", {2, 3, 0}}), ValidationError);
  EXPECT_THROW(apply_external(sim, SetPedPose{"p1", {0.5, 0.5, 0}}), ValidationError);
  EXPECT_THROW(apply_external(sim, ResolveAsk{"p1", true}), ValidationError);  // nothing asked yet
}

TEST(Run, FreeCorridor)
{
  const RunResult r = run(fixtures::scenario("a_free_corridor"), Mode::Social, 60.0);
  EXPECT_TRUE(r.metrics.success);
  EXPECT_EQ(r.metrics.n_asks, 0);
  EXPECT_LE(r.metrics.executed_path_length, 1.1 * 12.0);
  EXPECT_GE(r.metrics.executed_path_length, 12.0 - 0.25);
  EXPECT_EQ(r.metrics.n_collisions, 0);
  EXPECT_FALSE(r.metrics.min_pedestrian_distance);
  EXPECT_EQ(r.trace.back().kind, "goal");
}

TEST(Run, BlockedCorridorAsksOnceAndPasses)
{
  const RunResult r = run(fixtures::scenario("c_blocked_sole_corridor"), Mode::Social, 60.0);
  EXPECT_TRUE(r.metrics.success);
  EXPECT_EQ(r.metrics.n_asks, 1);
  EXPECT_EQ(r.metrics.n_collisions, 0);

  const auto asks = of_kind(r.trace, "ask");
  ASSERT_EQ(asks.size(), 1u);
  const auto& a = asks[0]->payload;
  EXPECT_EQ(a.at("utterance"), SocialNavConfig{}.utterance);
  EXPECT_EQ(a.at("addressed").size(), 2u);

  // a plan failure precedes clustering, which precedes the detection and the ask
  const auto fail = first_index(r.trace, "plan_failure"), cluster = first_index(r.trace, "cluster_report"),
             det = first_index(r.trace, "detection"), ask = first_index(r.trace, "ask");
  ASSERT_GE(fail, 0);
  EXPECT_LT(fail, cluster);
  EXPECT_LT(cluster, det);
  EXPECT_LT(det, ask);
  EXPECT_EQ(r.trace[static_cast<std::size_t>(fail)].tick, r.trace[static_cast<std::size_t>(cluster)].tick);
}

TEST(Run, BlockedCorridorBaselineFreezes)
{
  const RunResult r = run(fixtures::scenario("c_blocked_sole_corridor"), Mode::Baseline, 60.0);
  EXPECT_FALSE(r.metrics.success);
  EXPECT_EQ(r.metrics.n_asks, 0);
  EXPECT_GT(r.metrics.freeze_time, 10.0);
  EXPECT_DOUBLE_EQ(r.metrics.time_to_goal, 60.0);
  EXPECT_EQ(r.trace.back().kind, "timeout");
  EXPECT_NEAR(freeze_from_trace(r.trace, 0.05), r.metrics.freeze_time, 1e-6);
}

TEST(Run, DetourBaselineVersusSocial)
{
  const Scenario sc = fixtures::scenario("b_blocked_with_detour");
  const RunResult base = run(sc, Mode::Baseline, 60.0);
  const RunResult social = run(sc, Mode::Social, 60.0);
  ASSERT_TRUE(base.metrics.success);
  ASSERT_TRUE(social.metrics.success);
  EXPECT_EQ(base.metrics.n_asks, 0);
  EXPECT_LT(social.metrics.executed_path_length, base.metrics.executed_path_length);
  EXPECT_NEAR(freeze_from_trace(social.trace, 0.05), social.metrics.freeze_time, 1e-6);
}

TEST(Run, DeterministicTrace)
{
  const Scenario sc = fixtures::scenario("b_blocked_with_detour");
  EXPECT_EQ(to_jsonl(run(sc, Mode::Social, 30.0).trace), to_jsonl(run(sc, Mode::Social, 30.0).trace));
}

TEST(Run, TraceInvariants)
{
  for (const char* name : {"a_free_corridor", "b_blocked_with_detour", "c_blocked_sole_corridor"})
    for (Mode mode : {Mode::Baseline, Mode::Social}) {
      const Scenario sc = fixtures::scenario(name);
      const RunResult r = run(sc, mode, 40.0);
      double t = 0.0;
      for (const TraceEvent& e : r.trace) {
        EXPECT_GE(e.t, t) << name;
        t = e.t;
        EXPECT_NEAR(e.t, static_cast<double>(e.tick) * sc.config.dt, 1e-12);
      }
      // a snapshot closes the tick it belongs to
      for (std::size_t i = 0; i + 1 < r.trace.size(); ++i)
        if (r.trace[i].kind == "snapshot" && r.trace[i + 1].kind != "timeout") EXPECT_NE(r.trace[i + 1].tick, r.trace[i].tick) << name << " " << i;
      if (r.metrics.success) {
        const double straight = distance(sc.robot_start, sc.goal());
        EXPECT_GE(r.metrics.executed_path_length, straight - sc.config.goal_xy_tolerance);
      }
      EXPECT_LE(r.metrics.n_asks, sc.config.max_asks * std::max<int>(1, static_cast<int>(of_kind(r.trace, "plan_failure").size())));
      EXPECT_EQ(static_cast<int>(of_kind(r.trace, "ask").size()), r.metrics.n_asks);
    }
}

TEST(Run, MetricsJsonFields)
{
  const RunResult r = run(fixtures::scenario("c_blocked_sole_corridor"), Mode::Social, 60.0);
  const auto j = to_json(r.metrics);
  for (const char* key : {"success", "time_to_goal", "executed_path_length", "n_asks", "n_replans", "freeze_time",
                          "min_pedestrian_distance", "n_collisions"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_TRUE(j.at("min_pedestrian_distance").is_number());
}
