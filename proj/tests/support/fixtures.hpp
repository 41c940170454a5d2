#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "socnav/occupancy_grid.hpp"
#include "socnav/scenario.hpp"

namespace fixtures {

using namespace socnav;

inline std::filesystem::path scenario_dir()
{
  return SOCNAV_SCENARIO_DIR;
}

inline Scenario scenario(const std::string& name)
{
  return load_scenario_file(scenario_dir() / (name + ".json"));
}

/// rows[0] is the top row, as in scenario files.
inline OccupancyGrid grid_from_rows(const std::vector<std::string>& rows, double res = 1.0, Pose2D origin = {})
{
  const int h = static_cast<int>(rows.size());
  const int w = static_cast<int>(rows.front().size());
  std::vector<CellState> cells(static_cast<std::size_t>(w) * h);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const char ch = rows[static_cast<std::size_t>(h - 1 - r)][static_cast<std::size_t>(c)];
      cells[static_cast<std::size_t>(r) * w + c] =
          ch == '#' ? CellState::Occupied : ch == '?' ? CellState::Unknown : CellState::Free;
    }
  return OccupancyGrid(w, h, res, origin, std::move(cells));
}

inline OccupancyGrid random_grid(std::mt19937_64& gen, int w, int h, double res, double fill)
{
  std::bernoulli_distribution occ(fill);
  std::vector<CellState> cells(static_cast<std::size_t>(w) * h);
  for (auto& c : cells) c = occ(gen) ? CellState::Occupied : CellState::Free;
  return OccupancyGrid(w, h, res, {}, std::move(cells));
}

/// Randomized variant of one of the two blocked-corridor scenarios:
/// blockers moved along the corridor, mixed policies, detector misses and a
/// random level of consideration.
inline Scenario randomized_blocked(std::uint64_t seed)
{
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const bool detour = u(gen) < 0.5;
  Scenario s = scenario(detour ? "b_blocked_with_detour" : "c_blocked_sole_corridor");
  s.seed = seed;
  s.config.detection_miss_probability = u(gen) < 0.5 ? 0.0 : 0.6 * u(gen);
  s.config.level_of_consideration = u(gen) < 0.5 ? 0.0 : 10.0 * u(gen);
  s.config.max_asks = 1 + static_cast<int>(u(gen) * 2.0);
  if (u(gen) < 0.2) s.config.post_ask_policy = {PostAskPolicyKind::Abort, 3.0 + 5.0 * u(gen)};

  const double mid_y = detour ? 2.0 : 3.0;
  const double x = 5.5 + 4.0 * u(gen);
  const double spread = 0.35 + 0.15 * u(gen);
  const int count = 1 + static_cast<int>(u(gen) * 3.0);
  s.pedestrians.clear();
  for (int i = 0; i < count; ++i) {
    PedestrianSpec p;
    p.id = "p" + std::to_string(i + 1);
    const double y = count == 1 ? mid_y : mid_y + spread * (i == 0 ? 1.0 : i == 1 ? -1.0 : 0.0);
    p.start = make_pose(x + (i == 2 ? 0.7 : 0.0), y, 3.14159);
    p.radius = 0.3;
    const double kind = u(gen);
    if (kind < 0.25) {
      p.policy = StaticPolicy{};
    } else {
      CompliantPolicy c;
      c.p_comply = u(gen) < 0.3 ? u(gen) : 1.0;
      c.delay = 6.0 * u(gen);
      c.sidestep = 0.7 + 0.3 * u(gen);
      c.asks_needed = u(gen) < 0.2 ? 2 : 1;
      p.policy = c;
    }
    if (u(gen) < 0.2) p.relay = RelaySpec{u(gen), 1.5, 0.9};
    s.pedestrians.push_back(p);
  }
  validate(s);
  return s;
}

}  // namespace fixtures
