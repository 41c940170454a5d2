#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "socnav/config.hpp"
#include "socnav/occupancy_grid.hpp"
#include "socnav/pedestrians.hpp"

namespace socnav {

struct Scenario
{
  OccupancyGrid map;
  std::map<std::string, Pose2D> destinations;
  Pose2D robot_start{};
  std::string goal_label;
  std::vector<PedestrianSpec> pedestrians;
  SocialNavConfig config{};
  std::uint64_t seed = 0;

  const Pose2D& goal() const { return destinations.at(goal_label); }

  bool operator==(const Scenario&) const = default;
};

/// Parses and validates a scenario document. `base_dir` resolves a relative
/// `pgm_path`. Throws ParseError or ValidationError.
Scenario load_scenario(std::string_view text, const std::filesystem::path& base_dir = {});
Scenario load_scenario_file(const std::filesystem::path& file);

Scenario scenario_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

/// Writes the scenario with an inline map. Reloading gives an equal Scenario.
nlohmann::json to_json(const Scenario& scenario);
std::string serialize(const Scenario& scenario);

/// Re-checks the scenario invariants (goal label, free endpoints, ...).
void validate(const Scenario& scenario);

/// Reads a binary (P5) or ASCII (P2) PGM as map_server would.
OccupancyGrid load_pgm(const std::filesystem::path& file, double resolution, Pose2D origin,
                       bool negate, double occupied_thresh, double free_thresh);

nlohmann::json to_json(const SocialNavConfig& config);
nlohmann::json to_json(const PedestrianSpec& ped);
nlohmann::json to_json(const Pose2D& pose);

}  // namespace socnav
