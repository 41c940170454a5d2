#include "socnav/session.hpp"

#include "socnav/errors.hpp"

namespace socnav {

using nlohmann::json;

namespace {

constexpr double kTimeEps = 1e-9;

json error_frame(const json& id, const std::string& message)
{
  return {{"kind", "error"}, {"id", id}, {"message", message}};
}

const json& field(const json& msg, const char* key)
{
  auto it = msg.find(key);
  if (it == msg.end()) throw ParseError(std::string("missing field '") + key + "'");
  return *it;
}

std::string string_field(const json& msg, const char* key)
{
  const json& v = field(msg, key);
  if (!v.is_string()) throw ParseError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

double number_field(const json& msg, const char* key)
{
  const json& v = field(msg, key);
  if (!v.is_number()) throw ParseError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

}  // namespace

double Session::dt() const
{
  return sim_ ? sim_->scenario->config.dt : (opts_.dt ? *opts_.dt : 0.05);
}

std::vector<json> Session::handle_text(std::string_view frame)
{
  json msg;
  try {
    msg = json::parse(frame);
  } catch (const json::parse_error& e) {
    return {error_frame(nullptr, std::string("malformed frame: ") + e.what())};
  }
  return handle(msg);
}

std::vector<json> Session::handle(const json& msg)
{
  if (!msg.is_object()) return {error_frame(nullptr, "frame must be a JSON object")};
  const json id = msg.contains("id") ? msg.at("id") : json(nullptr);
  const auto cmd_it = msg.find("cmd");
  if (cmd_it == msg.end() || !cmd_it->is_string()) return {error_frame(id, "frame lacks a 'cmd' string")};
  const std::string cmd = cmd_it->get<std::string>();

  std::vector<json> frames;
  try {
    json ack = execute(msg, cmd);
    ack["kind"] = "ack";
    ack["id"] = id;
    ack["cmd"] = cmd;
    frames.push_back(std::move(ack));
  } catch (const std::exception& e) {
    return {error_frame(id, e.what())};
  }
  if (cmd == "load_scenario") {
    drain_events(frames);
    push_snapshot(frames);
  }
  return frames;
}

json Session::execute(const json& msg, const std::string& cmd)
{
  if (cmd == "load_scenario") {
    Scenario s;
    if (msg.contains("scenario")) {
      s = scenario_from_json(field(msg, "scenario"), opts_.base_dir);
    } else {
      std::filesystem::path p = string_field(msg, "path");
      if (p.is_relative()) p = opts_.base_dir / p;
      s = load_scenario_file(p);
    }
    if (opts_.dt) {
      s.config.dt = *opts_.dt;
      validate(s);
    }
    sim_ = make_sim(s);
    running_ = false;
    pending_steps_ = 0;
    queue_.clear();
    events_sent_ = 0;
    last_snapshot_ = -std::numeric_limits<double>::infinity();
    final_snapshot_sent_ = false;
    return json::object();
  }
  if (cmd == "set_mode") {
    mode_ = mode_from_string(string_field(msg, "mode"));
    return {{"mode", to_string(mode_)}};
  }

  if (!sim_) throw ValidationError("no scenario loaded");
  if (cmd == "pause") {
    running_ = false;
  } else if (cmd == "resume") {
    running_ = true;
  } else if (cmd == "step") {
    int n = 1;
    if (msg.contains("n")) {
      if (!msg.at("n").is_number_integer() || msg.at("n").get<int>() < 1)
        throw ParseError("field 'n' must be a positive integer");
      n = msg.at("n").get<int>();
    }
    pending_steps_ += n;
  } else if (cmd == "set_ped_pose") {
    const std::string ped = string_field(msg, "ped_id");
    const double theta = msg.contains("theta") ? number_field(msg, "theta") : 0.0;
    const Pose2D pose = make_pose(number_field(msg, "x"), number_field(msg, "y"), theta);
    // validate now so the error reaches the client with its id
    SimState probe = *sim_;
    probe.event_log.clear();
    apply_external(probe, SetPedPose{ped, pose});
    queue_.push_back(SetPedPose{ped, pose});
  } else if (cmd == "resolve_ask") {
    const std::string ped = string_field(msg, "ped_id");
    const json& comply = field(msg, "comply");
    if (!comply.is_boolean()) throw ParseError("field 'comply' must be a boolean");
    SimState probe = *sim_;
    probe.event_log.clear();
    apply_external(probe, ResolveAsk{ped, comply.get<bool>()});
    queue_.push_back(ResolveAsk{ped, comply.get<bool>()});
  } else {
    throw ParseError("unknown command '" + cmd + "'");
  }
  return json::object();
}

void Session::drain_events(std::vector<json>& frames)
{
  if (!sim_) return;
  const auto& log = sim_->event_log;
  for (; events_sent_ < log.size(); ++events_sent_)
    frames.push_back({{"kind", "event"}, {"event", to_json(log[events_sent_])}});
}

void Session::push_snapshot(std::vector<json>& frames)
{
  json s = snapshot(*sim_);
  s["kind"] = "snapshot";
  s["running"] = running_;
  s["mode"] = to_string(mode_);
  frames.push_back(std::move(s));
  last_snapshot_ = sim_->clock;
}

std::vector<json> Session::tick()
{
  std::vector<json> frames;
  if (!sim_) return frames;

  if (is_terminal(*sim_)) {
    if (!queue_.empty()) {
      frames.push_back(error_frame(nullptr, "simulation finished; queued commands dropped"));
      queue_.clear();
    }
    if (!final_snapshot_sent_) {
      push_snapshot(frames);
      final_snapshot_sent_ = true;
    }
    pending_steps_ = 0;
    return frames;
  }

  const bool advance = running_ || pending_steps_ > 0;
  if (!advance) {
    // paused: commands still take effect at this boundary
    if (queue_.empty()) return frames;
    for (const ExternalCommand& c : queue_) {
      try {
        apply_external(*sim_, c);
      } catch (const Error& e) {
        frames.push_back(error_frame(nullptr, e.what()));
      }
    }
    queue_.clear();
    drain_events(frames);
    push_snapshot(frames);
    return frames;
  }

  const bool manual = !running_;
  if (manual) --pending_steps_;
  std::vector<ExternalCommand> cmds;
  cmds.swap(queue_);
  try {
    sim_ = step(std::move(*sim_), mode_, cmds);
  } catch (const Error& e) {
    frames.push_back(error_frame(nullptr, e.what()));
    running_ = false;
    return frames;
  }
  drain_events(frames);
  if (manual || is_terminal(*sim_) || sim_->clock - last_snapshot_ >= snapshot_period - kTimeEps) {
    push_snapshot(frames);
    if (is_terminal(*sim_)) final_snapshot_sent_ = true;
  }
  return frames;
}

}  // namespace socnav
