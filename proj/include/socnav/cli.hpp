#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "socnav/simulation.hpp"

namespace socnav {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int scenario_error = 2;
inline constexpr int usage = 64;
}  // namespace exit_code

struct RunOptions
{
  std::filesystem::path scenario;
  Mode mode = Mode::Social;
  std::optional<std::uint64_t> seed;
  double max_time = 120.0;
  std::optional<double> dt;
  std::filesystem::path out;    // metrics JSON; stdout when empty
  std::filesystem::path trace;  // JSONL trace; skipped when empty
};

struct BatchOptions
{
  std::filesystem::path scenarios_dir;
  std::vector<Mode> modes{Mode::Baseline, Mode::Social};
  std::uint64_t seed = 0;
  int repeats = 1;
  double max_time = 120.0;
  std::optional<double> dt;
  std::filesystem::path out;  // CSV; stdout when empty
  int jobs = 1;
};

struct BatchRow
{
  std::string scenario;
  Mode mode = Mode::Social;
  std::uint64_t seed = 0;
  std::optional<Metrics> metrics;
  std::string error;
};

/// Loads a scenario and applies the seed/dt overrides; throws socnav::Error.
Scenario prepare_scenario(const std::filesystem::path& file, std::optional<std::uint64_t> seed,
                          std::optional<double> dt);

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err);

/// Rows in (scenario file name, mode, seed) order.
std::vector<BatchRow> run_batch(const BatchOptions& opts);
std::string batch_csv(const std::vector<BatchRow>& rows);
int cmd_batch(const BatchOptions& opts, std::ostream& out, std::ostream& err);

/// Full command line entry point: `run`, `batch` and `serve` subcommands.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace socnav
