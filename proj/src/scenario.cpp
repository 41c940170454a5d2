#include "socnav/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "socnav/costmap.hpp"
#include "socnav/errors.hpp"

namespace socnav {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where)
{
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok) throw ParseError(where + ": unknown key '" + key + "'");
  }
}

const json& required(const json& obj, const char* key, const std::string& where)
{
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + ": missing key '" + key + "'");
  return *it;
}

double number(const json& v, const std::string& where)
{
  if (!v.is_number()) throw ParseError(where + ": expected a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& where)
{
  if (!v.is_number_integer()) throw ParseError(where + ": expected an integer");
  return v.get<int>();
}

template <typename T>
void read_opt(const json& obj, const char* key, T& out, const std::string& where)
{
  auto it = obj.find(key);
  if (it == obj.end()) return;
  const std::string ctx = where + "." + key;
  if constexpr (std::is_same_v<T, double>) {
    out = number(*it, ctx);
  } else if constexpr (std::is_same_v<T, int>) {
    out = integer(*it, ctx);
  } else if constexpr (std::is_same_v<T, bool>) {
    if (!it->is_boolean()) throw ParseError(ctx + ": expected a boolean");
    out = it->get<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!it->is_string()) throw ParseError(ctx + ": expected a string");
    out = it->get<std::string>();
  }
}

Pose2D parse_pose(const json& v, const std::string& where)
{
  if (!v.is_array() || v.size() != 3) throw ParseError(where + ": expected [x, y, theta]");
  return make_pose(number(v[0], where), number(v[1], where), number(v[2], where));
}

OccupancyGrid parse_map(const json& m, const std::filesystem::path& base_dir)
{
  const std::string where = "map";
  if (!m.is_object()) throw ParseError("map: expected an object");
  const double resolution = number(required(m, "resolution", where), where + ".resolution");
  if (!(resolution > 0)) throw ValidationError("map.resolution must be positive");
  const Pose2D origin = parse_pose(required(m, "origin", where), where + ".origin");

  if (m.contains("pgm_path")) {
    check_keys(m, {"pgm_path", "resolution", "origin", "negate", "occupied_thresh", "free_thresh"}, where);
    std::string rel;
    read_opt(m, "pgm_path", rel, where);
    bool negate = false;
    double occ = 0.65, free = 0.196;
    read_opt(m, "negate", negate, where);
    read_opt(m, "occupied_thresh", occ, where);
    read_opt(m, "free_thresh", free, where);
    std::filesystem::path p(rel);
    if (p.is_relative()) p = base_dir / p;
    return load_pgm(p, resolution, origin, negate, occ, free);
  }

  check_keys(m, {"width", "height", "resolution", "origin", "rows"}, where);
  const int width = integer(required(m, "width", where), where + ".width");
  const int height = integer(required(m, "height", where), where + ".height");
  if (width <= 0 || height <= 0) throw ValidationError("map width and height must be positive");
  const json& rows = required(m, "rows", where);
  if (!rows.is_array()) throw ParseError("map.rows: expected an array of strings");
  if (rows.size() != static_cast<std::size_t>(height))
    throw ValidationError("map.rows: expected " + std::to_string(height) + " rows");

  std::vector<CellState> cells(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  for (int i = 0; i < height; ++i) {
    if (!rows[i].is_string()) throw ParseError("map.rows: expected strings");
    const std::string line = rows[i].get<std::string>();
    if (line.size() != static_cast<std::size_t>(width))
      throw ValidationError("map.rows[" + std::to_string(i) + "]: expected width " + std::to_string(width));
    const int row = height - 1 - i;  // first string is the top row
    for (int col = 0; col < width; ++col) {
      CellState s;
      switch (line[col]) {
        case '.': s = CellState::Free; break;
        case '#': s = CellState::Occupied; break;
        case '?': s = CellState::Unknown; break;
        default: throw ParseError("map.rows: invalid cell character '" + std::string(1, line[col]) + "'");
      }
      cells[static_cast<std::size_t>(row) * width + col] = s;
    }
  }
  return OccupancyGrid(width, height, resolution, origin, std::move(cells));
}

PostAskPolicy parse_policy(const json& v)
{
  const std::string where = "config.post_ask_policy";
  PostAskPolicy p;
  std::string type;
  if (v.is_string()) {
    type = v.get<std::string>();
  } else {
    check_keys(v, {"type", "timeout_s"}, where);
    read_opt(v, "type", type, where);
    read_opt(v, "timeout_s", p.timeout_s, where);
  }
  if (type == "freeze_until_clear") {
    p.kind = PostAskPolicyKind::FreezeUntilClear;
  } else if (type == "abort") {
    p.kind = PostAskPolicyKind::Abort;
  } else {
    throw ParseError(where + ": unknown policy '" + type + "'");
  }
  return p;
}

SocialNavConfig parse_config(const json& c)
{
  const std::string w = "config";
  SocialNavConfig cfg;
  check_keys(c,
             {"cluster_distance_gate", "meanshift_quantile", "bbox_width_gate", "perception_window_t",
              "reask_wait", "level_of_consideration", "max_asks", "post_ask_policy", "plan_fail_grace",
              "path_clear_lookahead", "utterance", "robot_radius", "inflation_radius",
              "goal_xy_tolerance", "dt", "detector_period_ticks", "detection_miss_probability",
              "hear_radius", "trace_snapshot_period", "laser", "camera"},
             w);
  read_opt(c, "cluster_distance_gate", cfg.cluster_distance_gate, w);
  read_opt(c, "meanshift_quantile", cfg.meanshift_quantile, w);
  read_opt(c, "bbox_width_gate", cfg.bbox_width_gate, w);
  read_opt(c, "perception_window_t", cfg.perception_window_t, w);
  read_opt(c, "reask_wait", cfg.reask_wait, w);
  read_opt(c, "level_of_consideration", cfg.level_of_consideration, w);
  read_opt(c, "max_asks", cfg.max_asks, w);
  if (c.contains("post_ask_policy")) cfg.post_ask_policy = parse_policy(c.at("post_ask_policy"));
  read_opt(c, "plan_fail_grace", cfg.plan_fail_grace, w);
  read_opt(c, "path_clear_lookahead", cfg.path_clear_lookahead, w);
  read_opt(c, "utterance", cfg.utterance, w);
  read_opt(c, "robot_radius", cfg.robot_radius, w);
  read_opt(c, "inflation_radius", cfg.inflation_radius, w);
  read_opt(c, "goal_xy_tolerance", cfg.goal_xy_tolerance, w);
  read_opt(c, "dt", cfg.dt, w);
  read_opt(c, "detector_period_ticks", cfg.detector_period_ticks, w);
  read_opt(c, "detection_miss_probability", cfg.detection_miss_probability, w);
  read_opt(c, "hear_radius", cfg.hear_radius, w);
  read_opt(c, "trace_snapshot_period", cfg.trace_snapshot_period, w);
  if (c.contains("laser")) {
    const json& l = c.at("laser");
    check_keys(l, {"fov", "beam_count", "range_max"}, w + ".laser");
    read_opt(l, "fov", cfg.laser.fov, w + ".laser");
    read_opt(l, "beam_count", cfg.laser.beam_count, w + ".laser");
    read_opt(l, "range_max", cfg.laser.range_max, w + ".laser");
  }
  if (c.contains("camera")) {
    const json& cam = c.at("camera");
    check_keys(cam, {"hfov", "image_width", "person_width", "range"}, w + ".camera");
    read_opt(cam, "hfov", cfg.camera.hfov, w + ".camera");
    read_opt(cam, "image_width", cfg.camera.image_width, w + ".camera");
    read_opt(cam, "person_width", cfg.camera.person_width, w + ".camera");
    read_opt(cam, "range", cfg.camera.range, w + ".camera");
  }
  return cfg;
}

PedestrianSpec parse_pedestrian(const json& p, std::size_t index)
{
  const std::string w = "pedestrians[" + std::to_string(index) + "]";
  check_keys(p, {"id", "start", "radius", "policy", "relay"}, w);
  PedestrianSpec spec;
  const json& id = required(p, "id", w);
  if (!id.is_string()) throw ParseError(w + ".id: expected a string");
  spec.id = id.get<std::string>();
  spec.start = parse_pose(required(p, "start", w), w + ".start");
  read_opt(p, "radius", spec.radius, w);

  if (p.contains("policy")) {
    const json& pol = p.at("policy");
    const std::string pw = w + ".policy";
    if (!pol.is_object()) throw ParseError(pw + ": expected an object");
    const json& type_v = required(pol, "type", pw);
    if (!type_v.is_string()) throw ParseError(pw + ".type: expected a string");
    const std::string type = type_v.get<std::string>();
    if (type == "static") {
      check_keys(pol, {"type"}, pw);
      spec.policy = StaticPolicy{};
    } else if (type == "compliant") {
      check_keys(pol, {"type", "p_comply", "delay", "sidestep", "asks_needed"}, pw);
      CompliantPolicy c;
      read_opt(pol, "p_comply", c.p_comply, pw);
      read_opt(pol, "delay", c.delay, pw);
      read_opt(pol, "sidestep", c.sidestep, pw);
      read_opt(pol, "asks_needed", c.asks_needed, pw);
      spec.policy = c;
    } else if (type == "waypoints") {
      check_keys(pol, {"type", "waypoints", "speed", "loop"}, pw);
      WaypointsPolicy wp;
      const json& list = required(pol, "waypoints", pw);
      if (!list.is_array()) throw ParseError(pw + ".waypoints: expected an array");
      for (const json& pt : list) {
        if (!pt.is_array() || pt.size() != 2) throw ParseError(pw + ".waypoints: expected [x, y] pairs");
        wp.waypoints.push_back({number(pt[0], pw), number(pt[1], pw), 0.0});
      }
      read_opt(pol, "speed", wp.speed, pw);
      read_opt(pol, "loop", wp.loop, pw);
      spec.policy = wp;
    } else if (type == "external") {
      check_keys(pol, {"type"}, pw);
      spec.policy = ExternalPolicy{};
    } else {
      throw ParseError(pw + ".type: unknown policy '" + type + "'");
    }
  }

  if (p.contains("relay")) {
    const json& r = p.at("relay");
    check_keys(r, {"p_relay", "radius", "sidestep"}, w + ".relay");
    RelaySpec relay;
    read_opt(r, "p_relay", relay.p_relay, w + ".relay");
    read_opt(r, "radius", relay.radius, w + ".relay");
    read_opt(r, "sidestep", relay.sidestep, w + ".relay");
    spec.relay = relay;
  }
  return spec;
}

void require_free_endpoint(const Costmap& costmap, const Pose2D& pose, const std::string& what)
{
  const auto cell = costmap.base().world_to_cell(pose.position());
  if (!cell) throw ValidationError(what + " lies outside the map");
  if (costmap.base().at(*cell) != CellState::Free) throw ValidationError(what + " lies in a non-free cell");
  if (costmap.lethal(*cell)) throw ValidationError(what + " lies in a lethal cell of the inflated map");
}

bool probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void validate(const Scenario& s)
{
  validate(s.config);
  if (!s.destinations.contains(s.goal_label))
    throw ValidationError("goal_label '" + s.goal_label + "' is not a destination");
  const Costmap costmap = inflate(s.map, s.config.robot_radius, s.config.inflation_radius);
  require_free_endpoint(costmap, s.robot_start, "robot_start");
  require_free_endpoint(costmap, s.goal(), "goal '" + s.goal_label + "'");

  std::set<std::string> ids;
  for (const PedestrianSpec& p : s.pedestrians) {
    const std::string w = "pedestrian '" + p.id + "'";
    if (p.id.empty()) throw ValidationError("pedestrian id must not be empty");
    if (!ids.insert(p.id).second) throw ValidationError("duplicate " + w);
    if (!(p.radius > 0)) throw ValidationError(w + ": radius must be positive");
    const auto cell = s.map.world_to_cell(p.start.position());
    if (!cell || s.map.at(*cell) != CellState::Free) throw ValidationError(w + ": start must be a free cell");
    if (const auto* c = std::get_if<CompliantPolicy>(&p.policy)) {
      if (!probability(c->p_comply)) throw ValidationError(w + ": p_comply must be in [0, 1]");
      if (!(c->sidestep > 0)) throw ValidationError(w + ": sidestep must be positive");
      if (c->delay < 0) throw ValidationError(w + ": delay must be non-negative");
      if (c->asks_needed < 1) throw ValidationError(w + ": asks_needed must be at least 1");
    }
    if (const auto* wp = std::get_if<WaypointsPolicy>(&p.policy)) {
      if (wp->speed < 0) throw ValidationError(w + ": speed must be non-negative");
    }
    if (p.relay) {
      if (!probability(p.relay->p_relay)) throw ValidationError(w + ": p_relay must be in [0, 1]");
      if (!(p.relay->radius > 0)) throw ValidationError(w + ": relay radius must be positive");
      if (!(p.relay->sidestep > 0)) throw ValidationError(w + ": relay sidestep must be positive");
    }
  }
}

Scenario scenario_from_json(const json& doc, const std::filesystem::path& base_dir)
{
  check_keys(doc, {"map", "destinations", "robot_start", "goal_label", "pedestrians", "config", "seed"},
             "scenario");
  Scenario s;
  s.map = parse_map(required(doc, "map", "scenario"), base_dir);

  const json& dest = required(doc, "destinations", "scenario");
  if (!dest.is_object()) throw ParseError("destinations: expected an object");
  for (const auto& [label, pose] : dest.items()) s.destinations[label] = parse_pose(pose, "destinations." + label);

  s.robot_start = parse_pose(required(doc, "robot_start", "scenario"), "robot_start");
  const json& goal = required(doc, "goal_label", "scenario");
  if (!goal.is_string()) throw ParseError("goal_label: expected a string");
  s.goal_label = goal.get<std::string>();

  if (doc.contains("pedestrians")) {
    const json& peds = doc.at("pedestrians");
    if (!peds.is_array()) throw ParseError("pedestrians: expected an array");
    for (std::size_t i = 0; i < peds.size(); ++i) s.pedestrians.push_back(parse_pedestrian(peds[i], i));
  }
  if (doc.contains("config")) s.config = parse_config(doc.at("config"));
  if (doc.contains("seed")) {
    const json& seed = doc.at("seed");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0))
      throw ParseError("seed: expected a non-negative integer");
    s.seed = seed.get<std::uint64_t>();
  }
  validate(s);
  return s;
}

Scenario load_scenario(std::string_view text, const std::filesystem::path& base_dir)
{
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed scenario document: ") + e.what());
  }
  try {
    return scenario_from_json(doc, base_dir);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed scenario document: ") + e.what());
  }
}

Scenario load_scenario_file(const std::filesystem::path& file)
{
  std::ifstream in(file);
  if (!in) throw ParseError("cannot read scenario file " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str(), file.parent_path());
}

OccupancyGrid load_pgm(const std::filesystem::path& file, double resolution, Pose2D origin, bool negate,
                       double occupied_thresh, double free_thresh)
{
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ParseError("cannot read map image " + file.string());

  auto next_token = [&]() {
    std::string tok;
    char ch;
    while (in.get(ch)) {
      if (ch == '#') {
        std::string skip;
        std::getline(in, skip);
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(ch))) {
        if (!tok.empty()) break;
        continue;
      }
      tok.push_back(ch);
    }
    if (tok.empty()) throw ParseError("truncated PGM header in " + file.string());
    return tok;
  };

  const std::string magic = next_token();
  if (magic != "P5" && magic != "P2") throw ParseError("unsupported image format " + magic + " (need P2/P5)");
  int width = 0, height = 0, maxval = 0;
  try {
    width = std::stoi(next_token());
    height = std::stoi(next_token());
    maxval = std::stoi(next_token());
  } catch (const std::logic_error&) {
    throw ParseError("malformed PGM header in " + file.string());
  }
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255)
    throw ParseError("unsupported PGM dimensions or depth in " + file.string());

  std::vector<int> pixels(static_cast<std::size_t>(width) * height);
  if (magic == "P5") {
    std::vector<char> raw(pixels.size());
    if (!in.read(raw.data(), static_cast<std::streamsize>(raw.size())))
      throw ParseError("truncated PGM data in " + file.string());
    for (std::size_t i = 0; i < raw.size(); ++i) pixels[i] = static_cast<unsigned char>(raw[i]);
  } else {
    for (auto& p : pixels) p = std::stoi(next_token());
  }

  std::vector<CellState> cells(pixels.size());
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) {
      const double v = pixels[static_cast<std::size_t>(r) * width + c] / static_cast<double>(maxval);
      const double occ = negate ? v : 1.0 - v;
      CellState s = CellState::Unknown;
      if (occ > occupied_thresh) s = CellState::Occupied;
      else if (occ < free_thresh) s = CellState::Free;
      cells[static_cast<std::size_t>(height - 1 - r) * width + c] = s;
    }
  return OccupancyGrid(width, height, resolution, origin, std::move(cells));
}

json to_json(const Pose2D& pose)
{
  return json::array({pose.x, pose.y, pose.theta});
}

json to_json(const SocialNavConfig& c)
{
  json policy;
  if (c.post_ask_policy.kind == PostAskPolicyKind::FreezeUntilClear) {
    policy = {{"type", "freeze_until_clear"}};
  } else {
    policy = {{"type", "abort"}, {"timeout_s", c.post_ask_policy.timeout_s}};
  }
  return {
      {"cluster_distance_gate", c.cluster_distance_gate},
      {"meanshift_quantile", c.meanshift_quantile},
      {"bbox_width_gate", c.bbox_width_gate},
      {"perception_window_t", c.perception_window_t},
      {"reask_wait", c.reask_wait},
      {"level_of_consideration", c.level_of_consideration},
      {"max_asks", c.max_asks},
      {"post_ask_policy", policy},
      {"plan_fail_grace", c.plan_fail_grace},
      {"path_clear_lookahead", c.path_clear_lookahead},
      {"utterance", c.utterance},
      {"robot_radius", c.robot_radius},
      {"inflation_radius", c.inflation_radius},
      {"goal_xy_tolerance", c.goal_xy_tolerance},
      {"dt", c.dt},
      {"detector_period_ticks", c.detector_period_ticks},
      {"detection_miss_probability", c.detection_miss_probability},
      {"hear_radius", c.hear_radius},
      {"trace_snapshot_period", c.trace_snapshot_period},
      {"laser", {{"fov", c.laser.fov}, {"beam_count", c.laser.beam_count}, {"range_max", c.laser.range_max}}},
      {"camera",
       {{"hfov", c.camera.hfov},
        {"image_width", c.camera.image_width},
        {"person_width", c.camera.person_width},
        {"range", c.camera.range}}},
  };
}

json to_json(const PedestrianSpec& p)
{
  json policy = std::visit(
      [](const auto& pol) -> json {
        using T = std::decay_t<decltype(pol)>;
        if constexpr (std::is_same_v<T, StaticPolicy>) {
          return {{"type", "static"}};
        } else if constexpr (std::is_same_v<T, CompliantPolicy>) {
          return {{"type", "compliant"},
                  {"p_comply", pol.p_comply},
                  {"delay", pol.delay},
                  {"sidestep", pol.sidestep},
                  {"asks_needed", pol.asks_needed}};
        } else if constexpr (std::is_same_v<T, WaypointsPolicy>) {
          json pts = json::array();
          for (const auto& w : pol.waypoints) pts.push_back({w.x, w.y});
          return {{"type", "waypoints"}, {"waypoints", pts}, {"speed", pol.speed}, {"loop", pol.loop}};
        } else {
          return {{"type", "external"}};
        }
      },
      p.policy);
  json out = {{"id", p.id}, {"start", to_json(p.start)}, {"radius", p.radius}, {"policy", policy}};
  if (p.relay)
    out["relay"] = {{"p_relay", p.relay->p_relay}, {"radius", p.relay->radius}, {"sidestep", p.relay->sidestep}};
  return out;
}

json to_json(const Scenario& s)
{
  json rows = json::array();
  for (int row = s.map.height() - 1; row >= 0; --row) {
    std::string line(static_cast<std::size_t>(s.map.width()), '.');
    for (int col = 0; col < s.map.width(); ++col) {
      switch (s.map.at({col, row})) {
        case CellState::Free: line[col] = '.'; break;
        case CellState::Occupied: line[col] = '#'; break;
        case CellState::Unknown: line[col] = '?'; break;
      }
    }
    rows.push_back(line);
  }
  json dest = json::object();
  for (const auto& [label, pose] : s.destinations) dest[label] = to_json(pose);
  json peds = json::array();
  for (const auto& p : s.pedestrians) peds.push_back(to_json(p));
  return {
      {"map",
       {{"width", s.map.width()},
        {"height", s.map.height()},
        {"resolution", s.map.resolution()},
        {"origin", to_json(s.map.origin())},
        {"rows", rows}}},
      {"destinations", dest},
      {"robot_start", to_json(s.robot_start)},
      {"goal_label", s.goal_label},
      {"pedestrians", peds},
      {"config", to_json(s.config)},
      {"seed", s.seed},
  };
}

std::string serialize(const Scenario& s)
{
  return to_json(s).dump(1);
}

}  // namespace socnav
