#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "socnav/simulation.hpp"

namespace socnav {

/// One interactive simulation behind the wire protocol, independent of the
/// transport. Client frames go through handle_text() or handle(); the transport calls tick()
/// once per simulation period. Both return the frames to send back.
///
/// Client frames: {id, cmd, ...}. cmd is one of load_scenario {scenario | path},
/// pause, resume, step {n}, set_mode {mode}, set_ped_pose {ped_id, x, y, theta},
/// resolve_ask {ped_id, comply}. Every frame is answered by exactly one
/// {kind:"ack", id, cmd} or {kind:"error", id, message}.
/// Server frames also include {kind:"event", event} for each trace event and
/// {kind:"snapshot", ...snapshot fields} at most every 0.1 s of simulated time.
class Session
{
public:
  struct Options
  {
    std::optional<double> dt;            // overrides the scenario's step
    std::filesystem::path base_dir = ".";  // resolves load_scenario {path}
  };

  Session() : Session(Options{}) {}
  explicit Session(Options opts) : opts_(std::move(opts)) {}

  std::vector<nlohmann::json> handle_text(std::string_view frame);
  std::vector<nlohmann::json> handle(const nlohmann::json& msg);

  /// Applies queued commands at the tick boundary, then advances one step when
  /// running or when manual steps are pending.
  std::vector<nlohmann::json> tick();

  bool loaded() const { return sim_.has_value(); }
  bool running() const { return running_; }
  Mode mode() const { return mode_; }
  const SimState* sim() const { return sim_ ? &*sim_ : nullptr; }
  /// Simulation period, or 0.05 s before any scenario is loaded.
  double dt() const;

  static constexpr double snapshot_period = 0.1;

private:
  nlohmann::json execute(const nlohmann::json& msg, const std::string& cmd);
  void drain_events(std::vector<nlohmann::json>& frames);
  void push_snapshot(std::vector<nlohmann::json>& frames);

  Options opts_;
  std::optional<SimState> sim_;
  Mode mode_ = Mode::Social;
  bool running_ = false;
  int pending_steps_ = 0;
  std::vector<ExternalCommand> queue_;
  std::size_t events_sent_ = 0;
  double last_snapshot_ = -std::numeric_limits<double>::infinity();
  bool final_snapshot_sent_ = false;
};

}  // namespace socnav
