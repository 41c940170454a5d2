#include "socnav/cli.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "socnav/errors.hpp"
#include "socnav/server.hpp"

namespace socnav {

namespace {

std::string fmt(double v)
{
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

std::string csv_field(const std::string& s)
{
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

bool write_file(const std::filesystem::path& path, const std::string& content, std::ostream& err)
{
  std::ofstream f(path, std::ios::binary);
  if (!(f << content)) {
    err << "socnav: cannot write " << path.string() << "\n";
    return false;
  }
  return true;
}

}  // namespace

Scenario prepare_scenario(const std::filesystem::path& file, std::optional<std::uint64_t> seed,
                          std::optional<double> dt)
{
  Scenario s = load_scenario_file(file);
  if (seed) s.seed = *seed;
  if (dt) {
    s.config.dt = *dt;
    validate(s);
  }
  return s;
}

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err)
{
  Scenario scenario;
  try {
    scenario = prepare_scenario(opts.scenario, opts.seed, opts.dt);
  } catch (const Error& e) {
    err << "socnav: " << opts.scenario.string() << ": " << e.what() << "\n";
    return exit_code::scenario_error;
  }
  const RunResult result = run(scenario, opts.mode, opts.max_time);
  const std::string metrics = to_json(result.metrics).dump(2) + "\n";
  if (opts.out.empty()) {
    out << metrics;
  } else if (!write_file(opts.out, metrics, err)) {
    return exit_code::usage;
  }
  if (!opts.trace.empty() && !write_file(opts.trace, to_jsonl(result.trace), err)) return exit_code::usage;
  return exit_code::ok;
}

std::vector<BatchRow> run_batch(const BatchOptions& opts)
{
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(opts.scenarios_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::vector<BatchRow> rows;
  for (const auto& f : files)
    for (Mode m : opts.modes)
      for (int k = 0; k < opts.repeats; ++k)
        rows.push_back({f.stem().string(), m, opts.seed + static_cast<std::uint64_t>(k), std::nullopt, {}});

  // one load per file; a broken file fails only its own rows
  std::vector<std::optional<Scenario>> loaded(files.size());
  std::vector<std::string> load_errors(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    try {
      loaded[i] = prepare_scenario(files[i], std::nullopt, opts.dt);
    } catch (const Error& e) {
      load_errors[i] = e.what();
    }
  }
  const std::size_t per_file = opts.modes.size() * static_cast<std::size_t>(std::max(opts.repeats, 0));

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      BatchRow& row = rows[i];
      const std::size_t fi = i / per_file;
      if (!loaded[fi]) {
        row.error = load_errors[fi];
        continue;
      }
      try {
        Scenario s = *loaded[fi];
        s.seed = row.seed;
        row.metrics = run(s, row.mode, opts.max_time).metrics;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  const int jobs = std::clamp(opts.jobs, 1, 64);
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

std::string batch_csv(const std::vector<BatchRow>& rows)
{
  std::string out =
      "scenario,mode,seed,success,time_to_goal,executed_path_length,n_asks,freeze_time,min_pedestrian_distance,"
      "error\n";
  for (const BatchRow& r : rows) {
    out += csv_field(r.scenario) + "," + to_string(r.mode) + "," + std::to_string(r.seed) + ",";
    if (r.metrics) {
      const Metrics& m = *r.metrics;
      out += std::string(m.success ? "true" : "false") + "," + fmt(m.time_to_goal) + "," +
             fmt(m.executed_path_length) + "," + std::to_string(m.n_asks) + "," + fmt(m.freeze_time) + "," +
             (m.min_pedestrian_distance ? fmt(*m.min_pedestrian_distance) : std::string()) + ",";
    } else {
      out += ",,,,,,";
    }
    out += csv_field(r.error) + "\n";
  }
  return out;
}

int cmd_batch(const BatchOptions& opts, std::ostream& out, std::ostream& err)
{
  std::error_code ec;
  if (!std::filesystem::is_directory(opts.scenarios_dir, ec)) {
    err << "socnav: " << opts.scenarios_dir.string() << " is not a directory\n";
    return exit_code::scenario_error;
  }
  const auto rows = run_batch(opts);
  if (rows.empty()) {
    err << "socnav: no scenarios in " << opts.scenarios_dir.string() << "\n";
    return exit_code::scenario_error;
  }
  const std::string csv = batch_csv(rows);
  if (opts.out.empty()) {
    out << csv;
  } else if (!write_file(opts.out, csv, err)) {
    return exit_code::usage;
  }
  for (const BatchRow& r : rows)
    if (!r.error.empty()) err << "socnav: " << r.scenario << " (" << to_string(r.mode) << ", seed " << r.seed
                              << "): " << r.error << "\n";
  return exit_code::ok;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Social navigation simulator", "socnav"};
  app.require_subcommand(1);

  const std::map<std::string, Mode> mode_map{{"baseline", Mode::Baseline}, {"social", Mode::Social}};

  RunOptions ro;
  std::string ro_scenario, ro_out, ro_trace;
  std::uint64_t ro_seed = 0;
  double ro_dt = 0.0;
  auto* run_cmd = app.add_subcommand("run", "Run one simulation");
  run_cmd->add_option("--scenario", ro_scenario, "Scenario JSON file")->required();
  run_cmd->add_option("--mode", ro.mode, "baseline or social")->transform(CLI::CheckedTransformer(mode_map));
  auto* ro_seed_opt = run_cmd->add_option("--seed", ro_seed, "Override the scenario seed");
  run_cmd->add_option("--max-time", ro.max_time, "Simulated seconds before giving up")->check(CLI::PositiveNumber);
  auto* ro_dt_opt = run_cmd->add_option("--dt", ro_dt, "Override the time step")->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", ro_out, "Metrics JSON output (default stdout)");
  run_cmd->add_option("--trace", ro_trace, "Trace JSONL output");

  BatchOptions bo;
  std::string bo_dir, bo_out;
  std::string bo_mode;
  double bo_dt = 0.0;
  auto* batch_cmd = app.add_subcommand("batch", "Run every scenario of a directory in both modes");
  batch_cmd->add_option("--scenarios-dir", bo_dir, "Directory of scenario JSON files")->required();
  batch_cmd->add_option("--mode", bo_mode, "Restrict to one mode")->check(CLI::IsMember({"baseline", "social"}));
  batch_cmd->add_option("--seed", bo.seed, "First seed");
  batch_cmd->add_option("--repeats", bo.repeats, "Seeds per scenario and mode")->check(CLI::PositiveNumber);
  batch_cmd->add_option("--max-time", bo.max_time, "Simulated seconds per run")->check(CLI::PositiveNumber);
  auto* bo_dt_opt = batch_cmd->add_option("--dt", bo_dt, "Override the time step")->check(CLI::PositiveNumber);
  batch_cmd->add_option("--out", bo_out, "CSV output (default stdout)");
  batch_cmd->add_option("--jobs", bo.jobs, "Worker threads")->check(CLI::Range(1, 64));

  ServeOptions so;
  auto* serve_cmd = app.add_subcommand("serve", "Serve interactive sessions over a web socket");
  serve_cmd->add_option("--port", so.port, "TCP port (0 picks a free one)");
  serve_cmd->add_option("--speed", so.speed, "Simulated seconds per wall-clock second")->check(CLI::PositiveNumber);
  serve_cmd->add_option("--dt", so.dt, "Override the time step")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_code::ok;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_code::ok;
  } catch (const CLI::ParseError& e) {
    err << "socnav: " << e.what() << "\n" << app.help();
    return exit_code::usage;
  }

  if (*run_cmd) {
    ro.scenario = ro_scenario;
    ro.out = ro_out;
    ro.trace = ro_trace;
    if (*ro_seed_opt) ro.seed = ro_seed;
    if (*ro_dt_opt) ro.dt = ro_dt;
    return cmd_run(ro, out, err);
  }
  if (*batch_cmd) {
    bo.scenarios_dir = bo_dir;
    bo.out = bo_out;
    if (!bo_mode.empty()) bo.modes = {mode_from_string(bo_mode)};
    if (*bo_dt_opt) bo.dt = bo_dt;
    return cmd_batch(bo, out, err);
  }
  return cmd_serve(so, out, err);
}

}  // namespace socnav
