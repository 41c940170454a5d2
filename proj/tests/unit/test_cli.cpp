#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "socnav/cli.hpp"
#include "support/fixtures.hpp"

using namespace socnav;
namespace fs = std::filesystem;

namespace {

struct Captured
{
  int code = 0;
  std::string out, err;
};

Captured cli(std::vector<std::string> args)
{
  args.insert(args.begin(), "socnav");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Captured c;
  c.code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  c.out = out.str();
  c.err = err.str();
  return c;
}

fs::path temp_dir(const std::string& name)
{
  const fs::path d = fs::temp_directory_path() / ("socnav_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p)
{
  std::ifstream f(p);
  return {std::istreambuf_iterator<char>(f), {}};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text)
{
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(CliRun, WritesMetricsAndTrace)
{
  const fs::path d = temp_dir("run");
  const auto scenario = (fixtures::scenario_dir() / "a_free_corridor.json").string();
  const Captured c = cli({"run", "--scenario", scenario, "--mode", "social", "--max-time", "60", "--out",
                          (d / "m.json").string(), "--trace", (d / "t.jsonl").string()});
  ASSERT_EQ(c.code, 0) << c.err;
  const auto metrics = nlohmann::json::parse(slurp(d / "m.json"));
  EXPECT_TRUE(metrics.at("success").get<bool>());
  EXPECT_EQ(metrics.at("n_asks"), 0);

  std::istringstream trace(slurp(d / "t.jsonl"));
  std::string line, last_kind;
  int lines = 0;
  while (std::getline(trace, line)) {
    const auto e = nlohmann::json::parse(line);
    for (const char* key : {"t", "tick", "kind", "payload"}) ASSERT_TRUE(e.contains(key));
    last_kind = e.at("kind");
    ++lines;
  }
  EXPECT_GT(lines, 10);
  EXPECT_EQ(last_kind, "goal");
}

TEST(CliRun, MetricsToStdoutAndOverrides)
{
  const auto scenario = (fixtures::scenario_dir() / "c_blocked_sole_corridor.json").string();
  const Captured c = cli({"run", "--scenario", scenario, "--mode", "baseline", "--max-time", "30"});
  ASSERT_EQ(c.code, 0) << c.err;
  const auto m = nlohmann::json::parse(c.out);
  EXPECT_FALSE(m.at("success").get<bool>());
  EXPECT_EQ(m.at("n_asks"), 0);
  EXPECT_GT(m.at("freeze_time").get<double>(), 10.0);
  EXPECT_DOUBLE_EQ(m.at("time_to_goal").get<double>(), 30.0);
}

TEST(CliRun, MissingScenarioIsAScenarioError)
{
  const Captured c = cli({"run", "--scenario", "/nonexistent/x.json"});
  EXPECT_EQ(c.code, exit_code::scenario_error);
  EXPECT_NE(c.err.find("x.json"), std::string::npos);

  const fs::path d = temp_dir("bad");
  std::ofstream(d / "bad.json") << "{\"map\": 3}";
  EXPECT_EQ(cli({"run", "--scenario", (d / "bad.json").string()}).code, exit_code::scenario_error);
}

TEST(Cli, UsageAndHelp)
{
  EXPECT_EQ(cli({}).code, exit_code::usage);
  EXPECT_EQ(cli({"fly"}).code, exit_code::usage);
  EXPECT_EQ(cli({"run"}).code, exit_code::usage);
  EXPECT_EQ(cli({"run", "--scenario", "x.json", "--mode", "sideways"}).code, exit_code::usage);
  EXPECT_EQ(cli({"run", "--scenario", "x.json", "--dt", "-1"}).code, exit_code::usage);
  const Captured help = cli({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("batch"), std::string::npos);
}

TEST(CliBatch, ThreeScenariosTwoModesFiveSeeds)
{
  const fs::path d = temp_dir("batch");
  const Captured c = cli({"batch", "--scenarios-dir", fixtures::scenario_dir().string(), "--repeats", "5",
                          "--max-time", "60", "--out", (d / "r.csv").string()});
  ASSERT_EQ(c.code, 0) << c.err;
  const auto rows = parse_csv(slurp(d / "r.csv"));
  ASSERT_EQ(rows.size(), 31u);
  EXPECT_EQ(rows[0][0], "scenario");
  EXPECT_EQ(rows[0].back(), "error");

  double base_sum = 0, social_sum = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ASSERT_EQ(rows[i].size(), rows[0].size());
    EXPECT_TRUE(rows[i].back().empty()) << rows[i].back();
    if (rows[i][0] != "b_blocked_with_detour") continue;
    (rows[i][1] == "baseline" ? base_sum : social_sum) += std::stod(rows[i][5]);
  }
  EXPECT_LE(social_sum / 5, base_sum / 5);
  EXPECT_EQ(rows[1][0], "a_free_corridor");
  EXPECT_EQ(rows[1][1], "baseline");
  EXPECT_EQ(rows[30][0], "c_blocked_sole_corridor");
  EXPECT_EQ(rows[30][2], "4");
}

TEST(CliBatch, Deterministic)
{
  BatchOptions o;
  o.scenarios_dir = fixtures::scenario_dir();
  o.modes = {Mode::Social};
  o.repeats = 2;
  o.max_time = 40;
  const std::string a = batch_csv(run_batch(o));
  o.jobs = 3;
  EXPECT_EQ(batch_csv(run_batch(o)), a);
}

TEST(CliBatch, BrokenFileFailsOnlyItsRows)
{
  const fs::path d = temp_dir("mixed");
  fs::copy_file(fixtures::scenario_dir() / "a_free_corridor.json", d / "a.json");
  std::ofstream(d / "z.json") << "not json";
  BatchOptions o;
  o.scenarios_dir = d;
  o.max_time = 40;
  const auto rows = run_batch(o);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_TRUE(rows[0].metrics);
  EXPECT_FALSE(rows[3].metrics);
  EXPECT_FALSE(rows[3].error.empty());
  const auto csv = parse_csv(batch_csv(rows));
  EXPECT_EQ(csv[4][0], "z");

  EXPECT_EQ(cli({"batch", "--scenarios-dir", (d / "nothing").string()}).code, exit_code::scenario_error);
}
