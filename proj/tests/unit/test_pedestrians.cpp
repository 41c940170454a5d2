#include <random>

#include <gtest/gtest.h>

#include "oracles/grid_oracles.hpp"
#include "socnav/pedestrians.hpp"
#include "support/fixtures.hpp"

using namespace socnav;

namespace {

PedestrianSpec compliant(const std::string& id, double x, double y, CompliantPolicy c = {})
{
  PedestrianSpec s;
  s.id = id;
  s.start = {x, y, 0};
  s.policy = c;
  return s;
}

OccupancyGrid hall()
{
  return OccupancyGrid(100, 40, 0.1, {0.0, 0.0, 0.0});
}

const Pose2D kRobot{1.0, 2.0, 0.0};
const Point2 kGoal{9.0, 2.0};

}  // namespace

TEST(OnAsk, CompliantPedestrianSchedulesSidestep)
{
  auto peds = initial_states({compliant("p", 3.0, 2.2, {1.0, 2.0, 0.8, 1})});
  Rng rng(1);
  const auto ids = on_ask(peds, {1, 10.0}, kRobot, kGoal, rng, 4.0);
  ASSERT_EQ(ids, std::vector<std::string>{"p"});
  EXPECT_EQ(peds[0].mode, PedestrianMode::Yielding);
  EXPECT_DOUBLE_EQ(peds[0].yield_until, 12.0);
  // left of the robot-to-goal line, so it steps further left
  EXPECT_NEAR(peds[0].yield_target.x(), 3.0, 1e-12);
  EXPECT_NEAR(peds[0].yield_target.y(), 3.0, 1e-12);
}

TEST(OnAsk, OutOfEarshotAndStaticIgnore)
{
  std::vector<PedestrianSpec> specs{compliant("far", 6.0, 2.0)};
  PedestrianSpec st;
  st.id = "static";
  st.start = {2.0, 2.0, 0};
  specs.push_back(st);
  auto peds = initial_states(specs);
  Rng rng(1);
  EXPECT_TRUE(on_ask(peds, {1, 0.0}, kRobot, kGoal, rng, 4.0).empty());
  EXPECT_EQ(peds[0].mode, PedestrianMode::Idle);
  EXPECT_FALSE(peds[0].heard(1));
  EXPECT_TRUE(peds[1].heard(1));
}

TEST(OnAsk, NeverCompliesWithZeroProbability)
{
  auto peds = initial_states({compliant("p", 2.0, 2.0, {0.0, 0.0, 1.0, 1})});
  Rng rng(9);
  for (int a = 1; a <= 50; ++a) EXPECT_TRUE(on_ask(peds, {a, 1.0 * a}, kRobot, kGoal, rng, 4.0).empty());
}

TEST(OnAsk, RelayFollowsAComplyingNeighbor)
{
  PedestrianSpec bystander;
  bystander.id = "b";
  bystander.start = {3.0, 1.5, 0};
  bystander.relay = RelaySpec{1.0, 1.5, 0.9};
  auto peds = initial_states({compliant("p", 3.0, 2.2, {1.0, 1.0, 0.8, 1}), bystander});
  Rng rng(3);
  const auto ids = on_ask(peds, {1, 5.0}, kRobot, kGoal, rng, 4.0);
  EXPECT_EQ(ids, (std::vector<std::string>{"p", "b"}));
  EXPECT_EQ(peds[1].mode, PedestrianMode::Yielding);
  EXPECT_DOUBLE_EQ(peds[1].yield_until, 6.0);
  EXPECT_NEAR(peds[1].yield_target.y(), 0.6, 1e-12);  // right of the line, steps right
}

TEST(OnAsk, AsksNeededCountsHeardAsks)
{
  auto peds = initial_states({compliant("p", 2.0, 2.0, {1.0, 0.0, 1.0, 2})});
  Rng rng(4);
  EXPECT_TRUE(on_ask(peds, {1, 1.0}, kRobot, kGoal, rng, 4.0).empty());
  EXPECT_TRUE(on_ask(peds, {1, 1.0}, kRobot, kGoal, rng, 4.0).empty());  // same ask twice is one ask
  EXPECT_EQ(peds[0].asks_heard, 1);
  EXPECT_EQ(on_ask(peds, {2, 6.0}, kRobot, kGoal, rng, 4.0).size(), 1u);
  EXPECT_TRUE(on_ask(peds, {3, 11.0}, kRobot, kGoal, rng, 4.0).empty());  // yields once
}

TEST(StepPedestrians, YieldFiresWhenDue)
{
  auto peds = initial_states({compliant("p", 3.0, 2.2, {1.0, 2.0, 0.8, 1})});
  Rng rng(1);
  on_ask(peds, {1, 10.0}, kRobot, kGoal, rng, 4.0);
  step_pedestrians(peds, hall(), 0.05, 11.95);
  EXPECT_EQ(peds[0].pose.y, 2.2);
  step_pedestrians(peds, hall(), 0.05, 12.0);
  EXPECT_NEAR(peds[0].pose.y, 3.0, 1e-12);
  EXPECT_EQ(peds[0].mode, PedestrianMode::Idle);
}

TEST(StepPedestrians, WallClampsTheSidestep)
{
  OccupancyGrid g = hall();
  for (int c = 0; c < 100; ++c)
    for (int r = 30; r < 40; ++r) g.set({c, r}, CellState::Occupied);  // wall from y = 3.0
  auto peds = initial_states({compliant("p", 3.0, 2.2, {1.0, 0.0, 1.0, 1})});
  Rng rng(1);
  on_ask(peds, {1, 0.0}, kRobot, kGoal, rng, 4.0);
  step_pedestrians(peds, g, 0.05, 0.05);
  const auto want = oracle::nearest_free_center(g, {3.0, 3.2}, 0.3, 0.6);
  ASSERT_TRUE(want);
  EXPECT_NEAR(peds[0].pose.x, want->x(), 1e-12);
  EXPECT_NEAR(peds[0].pose.y, want->y(), 1e-12);
  EXPECT_TRUE(oracle::disc_fits(g, peds[0].pose.position(), 0.3));
}

TEST(StepPedestrians, WalkerAdvancesAtSpeed)
{
  PedestrianSpec w;
  w.id = "w";
  w.start = {1.0, 1.0, 0};
  w.policy = WaypointsPolicy{{{3.0, 1.0, 0}}, 2.0, false};
  auto peds = initial_states({w});
  step_pedestrians(peds, hall(), 0.05, 0.05);
  EXPECT_NEAR(peds[0].pose.x, 1.1, 1e-12);
  for (int k = 2; k <= 40; ++k) step_pedestrians(peds, hall(), 0.05, 0.05 * k);
  EXPECT_NEAR(peds[0].pose.x, 3.0, 1e-12);
  EXPECT_EQ(peds[0].mode, PedestrianMode::Idle);
}

TEST(StepPedestrians, LoopingWalkerReturns)
{
  PedestrianSpec w;
  w.id = "w";
  w.start = {1.0, 1.0, 0};
  w.policy = WaypointsPolicy{{{2.0, 1.0, 0}, {1.0, 1.0, 0}}, 1.0, true};
  auto peds = initial_states({w});
  for (int k = 1; k <= 40; ++k) step_pedestrians(peds, hall(), 0.05, 0.05 * k);
  EXPECT_NEAR(peds[0].pose.x, 1.0, 1e-9);
  EXPECT_EQ(peds[0].mode, PedestrianMode::Moving);
}

TEST(ClampToFree, MatchesNearestFreeOracle)
{
  std::mt19937_64 gen(71);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  int clamped = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const OccupancyGrid g = fixtures::random_grid(gen, 30, 30, 0.1, 0.08);
    const Point2 target(u(gen), u(gen));
    const auto got = clamp_to_free(g, target, 0.3);
    if (oracle::disc_fits(g, target, 0.3)) {
      ASSERT_TRUE(got);
      EXPECT_EQ(*got, target);
      continue;
    }
    const auto want = oracle::nearest_free_center(g, target, 0.3, 0.6);
    ASSERT_EQ(got.has_value(), want.has_value()) << "trial " << trial;
    if (!got) continue;
    ++clamped;
    EXPECT_NEAR((*got - *want).norm(), 0.0, 1e-12) << "trial " << trial;
  }
  EXPECT_GT(clamped, 10);
}

TEST(PedestrianProperties, NeverEnterOccupiedCells)
{
  std::mt19937_64 gen(72);
  std::uniform_real_distribution<double> ux(0.5, 9.5), uy(0.5, 3.5);
  for (int trial = 0; trial < 40; ++trial) {
    OccupancyGrid g = hall();
    std::uniform_int_distribution<int> uc(0, 99), ur(0, 39);
    for (int k = 0; k < 150; ++k) g.set({uc(gen), ur(gen)}, CellState::Occupied);
    std::vector<PedestrianSpec> specs;
    for (int i = 0; i < 4; ++i) {
      PedestrianSpec s;
      s.id = "p" + std::to_string(i);
      s.radius = 0.2;
      Point2 start;
      do start = {ux(gen), uy(gen)};
      while (!disc_is_free(g, start, s.radius));
      s.start = {start.x(), start.y(), 0};
      if (i % 2) {
        s.policy = CompliantPolicy{1.0, 0.5, 1.0, 1};
      } else {
        s.policy = WaypointsPolicy{{{ux(gen), uy(gen), 0}, {ux(gen), uy(gen), 0}}, 1.2, true};
      }
      specs.push_back(s);
    }
    auto peds = initial_states(specs);
    Rng rng(trial);
    const Pose2D robot{ux(gen), uy(gen), 0};
    for (int k = 1; k <= 200; ++k) {
      if (k == 20) on_ask(peds, {1, 1.0}, robot, {5, 2}, rng, 20.0);
      step_pedestrians(peds, g, 0.05, 0.05 * k);
      for (const auto& p : peds) ASSERT_TRUE(oracle::disc_fits(g, p.pose.position(), p.radius)) << p.id;
    }
  }
}

TEST(PedestrianProperties, SameSeedSameOutcome)
{
  std::vector<PedestrianSpec> specs;
  for (int i = 0; i < 5; ++i) specs.push_back(compliant("p" + std::to_string(i), 2.0 + 0.5 * i, 2.0, {0.5, 1.0, 1.0, 1}));
  auto run = [&](std::uint64_t seed) {
    auto peds = initial_states(specs);
    Rng rng(seed);
    std::vector<std::string> all;
    for (int a = 1; a <= 3; ++a)
      for (auto& id : on_ask(peds, {a, 5.0 * a}, kRobot, kGoal, rng, 4.0)) all.push_back(id);
    return all;
  };
  EXPECT_EQ(run(11), run(11));
  bool differs = false;
  for (std::uint64_t s = 12; s < 40 && !differs; ++s) differs = run(s) != run(11);
  EXPECT_TRUE(differs);
}

TEST(SidestepDirection, PerpendicularAwayFromTheLine)
{
  const Point2 d = sidestep_direction({0, 0, 0}, {4, 0}, {2, -0.1});
  EXPECT_NEAR(d.x(), 0.0, 1e-12);
  EXPECT_NEAR(d.y(), -1.0, 1e-12);
  const Point2 heading = sidestep_direction({0, 0, std::numbers::pi / 2}, {0, 0}, {1, 1});
  EXPECT_NEAR(heading.x(), 1.0, 1e-12);
}
