#include "uavsched/domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "uavsched/mobility.hpp"

namespace uavsched {

ValidationError::ValidationError(std::string field, const std::string& message)
    : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

std::string_view to_string(EventClass c) {
  switch (c) {
    case EventClass::kDefault: return "default";
    case EventClass::kSmoke: return "smoke";
    case EventClass::kFire: return "fire";
  }
  return "default";
}

EventClass event_class_from_string(std::string_view name) {
  if (name == "default") return EventClass::kDefault;
  if (name == "smoke") return EventClass::kSmoke;
  if (name == "fire") return EventClass::kFire;
  throw ValidationError("event_class", "unknown class '" + std::string(name) + "'");
}

std::string_view to_string(RewardMode m) {
  return m == RewardMode::kRaw ? "raw" : "normalized";
}

RewardMode reward_mode_from_string(std::string_view name) {
  if (name == "raw") return RewardMode::kRaw;
  if (name == "normalized") return RewardMode::kNormalized;
  throw ValidationError("reward_mode", "expected 'raw' or 'normalized', got '" +
                                           std::string(name) + "'");
}

double ContentSizeMap::of(EventClass c) const {
  switch (c) {
    case EventClass::kDefault: return default_size;
    case EventClass::kSmoke: return smoke;
    case EventClass::kFire: return fire;
  }
  return default_size;
}

double ContentSizeMap::max() const { return std::max({default_size, smoke, fire}); }

double Scenario::data_capacity() const {
  if (d_capacity) return *d_capacity;
  return static_cast<double>(horizon) * static_cast<double>(uavs.size()) * content_sizes.max();
}

double Scenario::clock_origin() const {
  double origin = 0.0;
  bool first = true;
  for (const auto& u : uavs) {
    if (u.waypoints.empty()) continue;
    if (first || u.waypoints.front().time < origin) origin = u.waypoints.front().time;
    first = false;
  }
  return origin;
}

double SystemState::held_by(std::size_t uav) const {
  double sum = 0.0;
  for (const auto& c : uav_contents[uav]) sum += c.size;
  return sum;
}

std::optional<int> Assignment::tower_of(int uav) const {
  for (const auto& p : pairs)
    if (p.uav == uav) return p.tower;
  return std::nullopt;
}

int Assignment::load_of(int tower) const {
  return static_cast<int>(
      std::count_if(pairs.begin(), pairs.end(), [&](const Pair& p) { return p.tower == tower; }));
}

void Assignment::add(Pair p) {
  auto it = std::lower_bound(pairs.begin(), pairs.end(), p);
  if (it == pairs.end() || *it != p) pairs.insert(it, p);
}

void Assignment::remove(Pair p) {
  auto it = std::lower_bound(pairs.begin(), pairs.end(), p);
  if (it != pairs.end() && *it == p) pairs.erase(it);
}

std::string Assignment::to_string() const {
  if (pairs.empty()) return "-";
  std::string out;
  for (const auto& p : pairs) {
    if (!out.empty()) out += ';';
    out += std::to_string(p.tower) + ':' + std::to_string(p.uav);
  }
  return out;
}

// clang-format off
std::vector<std::vector<Waypoint>> default_waypoints() {
  // rows: minutes 10..100, columns: UAV #1..#10
  static const double table[10][10][2] = {
      {{125, 1075}, {375, 1175}, {275, 800}, {625, 475}, {100, 100}, {625, 225}, {550, 1075}, {475, 800}, {150, 825}, {650, 1200}},
      {{625, 1075}, {200, 1075}, {175, 625}, {575, 250}, {150, 200}, {125, 225}, {625, 900}, {575, 625}, {175, 1025}, {600, 1100}},
      {{625, 650}, {125, 900}, {275, 425}, {375, 150}, {200, 300}, {125, 625}, {625, 650}, {475, 425}, {375, 1100}, {550, 1100}},
      {{120, 650}, {125, 650}, {475, 425}, {175, 250}, {250, 400}, {625, 625}, {625, 400}, {275, 425}, {575, 1025}, {500, 900}},
      {{120, 225}, {125, 400}, {575, 625}, {150, 475}, {300, 500}, {625, 1075}, {550, 225}, {175, 625}, {625, 825}, {450, 800}},
      {{625, 225}, {200, 225}, {475, 800}, {375, 650}, {350, 600}, {125, 1075}, {375, 150}, {275, 800}, {375, 650}, {400, 700}},
      {{125, 225}, {375, 150}, {275, 800}, {625, 825}, {400, 700}, {625, 1075}, {200, 225}, {475, 800}, {150, 475}, {350, 600}},
      {{125, 650}, {550, 225}, {175, 625}, {575, 1025}, {450, 800}, {625, 650}, {125, 400}, {575, 625}, {175, 250}, {300, 500}},
      {{625, 650}, {625, 400}, {275, 425}, {375, 1100}, {500, 900}, {125, 650}, {125, 650}, {475, 425}, {375, 150}, {250, 400}},
      {{625, 1075}, {625, 650}, {475, 425}, {175, 1025}, {550, 1000}, {125, 225}, {125, 900}, {275, 425}, {575, 250}, {200, 300}},
  };
  std::vector<std::vector<Waypoint>> out(10);
  for (int row = 0; row < 10; ++row)
    for (int uav = 0; uav < 10; ++uav)
      out[uav].push_back({(row + 1) * 600.0, {table[row][uav][0], table[row][uav][1]}});
  return out;
}
// clang-format on

Scenario default_scenario() {
  Scenario s;
  const Vec2 quincunx[] = {{625, 625}, {312.5, 312.5}, {312.5, 937.5}, {937.5, 312.5}, {937.5, 937.5}};
  for (int i = 0; i < 5; ++i) s.towers.push_back(TowerSpec{.id = i + 1, .position = quincunx[i]});
  auto wps = default_waypoints();
  for (int j = 0; j < 10; ++j) {
    UavSpec u;
    u.id = j + 1;
    u.waypoints = std::move(wps[j]);
    s.uavs.push_back(std::move(u));
  }
  return s;
}

namespace {

void reject_unknown_keys(const Json& obj, std::initializer_list<std::string_view> known,
                         const std::string& path) {
  if (!obj.is_object()) throw ValidationError(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ValidationError(path.empty() ? key : path + "." + key, "unknown key");
  }
}

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

template <typename T>
void read(const Json& obj, std::string_view key, T& out, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(join(path, key), "wrong type");
  }
}

Vec2 read_vec2(const Json& j, const std::string& path) {
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  if (j.is_object()) {
    reject_unknown_keys(j, {"x", "y"}, path);
    if (j.contains("x") && j.contains("y") && j["x"].is_number() && j["y"].is_number())
      return {j["x"].get<double>(), j["y"].get<double>()};
  }
  throw ValidationError(path, "expected [x, y]");
}

Airframe read_airframe(const Json& j, const std::string& path) {
  if (j.is_string()) {
    if (j.get<std::string>() == "phantom4pro") return Airframe::phantom4pro();
    throw ValidationError(path, "unknown airframe preset '" + j.get<std::string>() + "'");
  }
  reject_unknown_keys(j, {"preset", "delta", "rho", "s", "A", "Omega", "R", "k", "W", "U_tip", "v0", "d0"},
                      path);
  Airframe a = Airframe::phantom4pro();
  if (j.contains("preset") && j["preset"] != "phantom4pro")
    throw ValidationError(join(path, "preset"), "unknown airframe preset");
  read(j, "delta", a.delta, path);
  read(j, "rho", a.rho, path);
  read(j, "s", a.s, path);
  read(j, "A", a.A, path);
  read(j, "Omega", a.Omega, path);
  read(j, "R", a.R, path);
  read(j, "k", a.k, path);
  read(j, "W", a.W, path);
  read(j, "U_tip", a.U_tip, path);
  read(j, "v0", a.v0, path);
  read(j, "d0", a.d0, path);
  return a;
}

std::vector<Waypoint> read_waypoints(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ValidationError(path, "expected an array");
  std::vector<Waypoint> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string p = path + "[" + std::to_string(k) + "]";
    const Json& w = j[k];
    reject_unknown_keys(w, {"time", "position"}, p);
    if (!w.contains("time") || !w["time"].is_number()) throw ValidationError(p + ".time", "missing");
    if (!w.contains("position")) throw ValidationError(p + ".position", "missing");
    out.push_back({w["time"].get<double>(), read_vec2(w["position"], p + ".position")});
  }
  return out;
}

bool inside(Vec2 p, double side) { return p.x >= 0 && p.y >= 0 && p.x <= side && p.y <= side; }

}  // namespace

Scenario build_scenario(const Json& config) {
  const Json cfg = config.is_null() ? Json::object() : config;
  reject_unknown_keys(cfg,
                      {"area_side", "grid_dim", "towers", "uavs", "step_len", "horizon", "epsilon",
                       "rng_seed", "reward_mode", "event_resample_prob", "content_size_map",
                       "sigma_floor", "d_capacity", "waypoints_csv", "mdp"},
                      "");
  Scenario s = default_scenario();
  read(cfg, "area_side", s.area_side, "");
  read(cfg, "grid_dim", s.grid_dim, "");
  read(cfg, "step_len", s.step_len, "");
  read(cfg, "horizon", s.horizon, "");
  read(cfg, "epsilon", s.epsilon, "");
  read(cfg, "rng_seed", s.rng_seed, "");
  read(cfg, "event_resample_prob", s.event_resample_prob, "");
  read(cfg, "sigma_floor", s.sigma_floor, "");
  if (cfg.contains("d_capacity")) {
    double d = 0;
    read(cfg, "d_capacity", d, "");
    s.d_capacity = d;
  }
  if (cfg.contains("reward_mode")) {
    if (!cfg["reward_mode"].is_string()) throw ValidationError("reward_mode", "wrong type");
    s.reward_mode = reward_mode_from_string(cfg["reward_mode"].get<std::string>());
  }
  if (cfg.contains("content_size_map")) {
    const Json& m = cfg["content_size_map"];
    reject_unknown_keys(m, {"default", "smoke", "fire"}, "content_size_map");
    read(m, "default", s.content_sizes.default_size, "content_size_map");
    read(m, "smoke", s.content_sizes.smoke, "content_size_map");
    read(m, "fire", s.content_sizes.fire, "content_size_map");
  }

  if (cfg.contains("towers")) {
    const Json& arr = cfg["towers"];
    if (!arr.is_array()) throw ValidationError("towers", "expected an array");
    s.towers.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = "towers[" + std::to_string(i) + "]";
      const Json& t = arr[i];
      reject_unknown_keys(t, {"id", "position", "panels", "offer_power", "eta_tower"}, p);
      TowerSpec tower;
      tower.id = static_cast<int>(i) + 1;
      read(t, "id", tower.id, p);
      if (!t.contains("position")) throw ValidationError(p + ".position", "missing");
      tower.position = read_vec2(t["position"], p + ".position");
      read(t, "panels", tower.panels, p);
      read(t, "offer_power", tower.offer_power, p);
      read(t, "eta_tower", tower.eta_tower, p);
      s.towers.push_back(tower);
    }
  }

  std::map<int, std::vector<Waypoint>> csv_waypoints;
  if (cfg.contains("waypoints_csv")) {
    if (!cfg["waypoints_csv"].is_string()) throw ValidationError("waypoints_csv", "wrong type");
    csv_waypoints = load_waypoints_csv(cfg["waypoints_csv"].get<std::string>());
    s.uavs.clear();
    for (auto& [id, wps] : csv_waypoints) {
      UavSpec u;
      u.id = id;
      u.waypoints = wps;
      s.uavs.push_back(std::move(u));
    }
  }

  if (cfg.contains("uavs")) {
    const Json& arr = cfg["uavs"];
    if (!arr.is_array()) throw ValidationError("uavs", "expected an array");
    s.uavs.clear();
    for (std::size_t j = 0; j < arr.size(); ++j) {
      const std::string p = "uavs[" + std::to_string(j) + "]";
      const Json& u = arr[j];
      reject_unknown_keys(u,
                          {"id", "waypoints", "speed", "battery_capacity", "eta_uav", "airframe",
                           "altitude", "fov"},
                          p);
      UavSpec uav;
      uav.id = static_cast<int>(j) + 1;
      read(u, "id", uav.id, p);
      if (u.contains("waypoints")) {
        uav.waypoints = read_waypoints(u["waypoints"], p + ".waypoints");
      } else if (auto it = csv_waypoints.find(uav.id); it != csv_waypoints.end()) {
        uav.waypoints = it->second;
      } else {
        throw ValidationError(p + ".waypoints", "missing");
      }
      read(u, "speed", uav.speed, p);
      read(u, "battery_capacity", uav.battery_capacity, p);
      read(u, "eta_uav", uav.eta_uav, p);
      read(u, "altitude", uav.altitude, p);
      read(u, "fov", uav.fov, p);
      if (u.contains("airframe")) uav.airframe = read_airframe(u["airframe"], p + ".airframe");
      s.uavs.push_back(std::move(uav));
    }
  }

  validate_scenario(s);
  return s;
}

void validate_scenario(const Scenario& s) {
  if (!(s.area_side > 0)) throw ValidationError("area_side", "must be > 0");
  if (s.grid_dim < 1) throw ValidationError("grid_dim", "must be >= 1");
  if (s.horizon < 1) throw ValidationError("horizon", "must be >= 1");
  if (!(s.step_len > 0)) throw ValidationError("step_len", "must be > 0");
  if (!(s.epsilon >= 0 && s.epsilon <= 1)) throw ValidationError("epsilon", "must lie in [0, 1]");
  if (!(s.event_resample_prob >= 0 && s.event_resample_prob <= 1))
    throw ValidationError("event_resample_prob", "must lie in [0, 1]");
  if (!(s.sigma_floor > 0)) throw ValidationError("sigma_floor", "must be > 0");
  if (s.d_capacity && !(*s.d_capacity > 0)) throw ValidationError("d_capacity", "must be > 0");
  if (!(s.content_sizes.default_size > 0)) throw ValidationError("content_size_map.default", "must be > 0");
  if (!(s.content_sizes.smoke > 0)) throw ValidationError("content_size_map.smoke", "must be > 0");
  if (!(s.content_sizes.fire > 0)) throw ValidationError("content_size_map.fire", "must be > 0");

  std::set<int> ids;
  for (std::size_t i = 0; i < s.towers.size(); ++i) {
    const auto& t = s.towers[i];
    const std::string p = "towers[" + std::to_string(i) + "]";
    if (!ids.insert(t.id).second) throw ValidationError(p + ".id", "duplicate id " + std::to_string(t.id));
    if (!inside(t.position, s.area_side)) throw ValidationError(p + ".position", "outside the area");
    if (t.panels < 1) throw ValidationError(p + ".panels", "must be >= 1");
    if (!(t.offer_power > 0)) throw ValidationError(p + ".offer_power", "must be > 0");
    if (!(t.eta_tower > 0 && t.eta_tower <= 1)) throw ValidationError(p + ".eta_tower", "must lie in (0, 1]");
  }
  ids.clear();
  for (std::size_t j = 0; j < s.uavs.size(); ++j) {
    const auto& u = s.uavs[j];
    const std::string p = "uavs[" + std::to_string(j) + "]";
    if (!ids.insert(u.id).second) throw ValidationError(p + ".id", "duplicate id " + std::to_string(u.id));
    if (!(u.speed > 0)) throw ValidationError(p + ".speed", "must be > 0");
    if (!(u.battery_capacity > 0)) throw ValidationError(p + ".battery_capacity", "must be > 0");
    if (!(u.eta_uav > 0 && u.eta_uav <= 1)) throw ValidationError(p + ".eta_uav", "must lie in (0, 1]");
    if (!(u.altitude >= 0)) throw ValidationError(p + ".altitude", "must be >= 0");
    if (!(u.fov > 0 && u.fov < 180)) throw ValidationError(p + ".fov", "must lie in (0, 180)");
    if (auto bad = airframe_errors(u.airframe); !bad.empty())
      throw ValidationError(p + ".airframe." + bad.front(), "must be > 0");
    if (!tip_speed_consistent(u.airframe))
      spdlog::warn("{}.airframe: U_tip {} differs from Omega * R = {}", p, u.airframe.U_tip,
                   u.airframe.Omega * u.airframe.R);
    if (u.waypoints.empty()) throw ValidationError(p + ".waypoints", "at least one waypoint required");
    for (std::size_t k = 0; k < u.waypoints.size(); ++k) {
      const std::string wp = p + ".waypoints[" + std::to_string(k) + "]";
      if (!inside(u.waypoints[k].position, s.area_side))
        throw ValidationError(wp + ".position", "outside the area");
      if (k > 0 && !(u.waypoints[k].time > u.waypoints[k - 1].time))
        throw ValidationError(wp + ".time", "waypoint times must be strictly increasing");
    }
    try {
      Trajectory check(u.waypoints, u.speed);
    } catch (const ValidationError& e) {
      throw ValidationError(p + "." + e.field(), "leg cannot be flown before the next waypoint time");
    }
  }
}

Json scenario_to_json(const Scenario& s) {
  auto vec = [](Vec2 v) { return Json::array({v.x, v.y}); };
  Json j = Json::object();
  j["area_side"] = s.area_side;
  j["grid_dim"] = s.grid_dim;
  j["step_len"] = s.step_len;
  j["horizon"] = s.horizon;
  j["epsilon"] = s.epsilon;
  j["rng_seed"] = s.rng_seed;
  j["reward_mode"] = std::string(to_string(s.reward_mode));
  j["event_resample_prob"] = s.event_resample_prob;
  j["content_size_map"] = {{"default", s.content_sizes.default_size},
                           {"smoke", s.content_sizes.smoke},
                           {"fire", s.content_sizes.fire}};
  j["sigma_floor"] = s.sigma_floor;
  if (s.d_capacity) j["d_capacity"] = *s.d_capacity;
  j["towers"] = Json::array();
  for (const auto& t : s.towers)
    j["towers"].push_back({{"id", t.id},
                           {"position", vec(t.position)},
                           {"panels", t.panels},
                           {"offer_power", t.offer_power},
                           {"eta_tower", t.eta_tower}});
  j["uavs"] = Json::array();
  for (const auto& u : s.uavs) {
    Json wps = Json::array();
    for (const auto& w : u.waypoints) wps.push_back({{"time", w.time}, {"position", vec(w.position)}});
    const Airframe& a = u.airframe;
    j["uavs"].push_back({{"id", u.id},
                         {"waypoints", wps},
                         {"speed", u.speed},
                         {"battery_capacity", u.battery_capacity},
                         {"eta_uav", u.eta_uav},
                         {"altitude", u.altitude},
                         {"fov", u.fov},
                         {"airframe",
                          {{"delta", a.delta}, {"rho", a.rho}, {"s", a.s}, {"A", a.A},
                           {"Omega", a.Omega}, {"R", a.R}, {"k", a.k}, {"W", a.W},
                           {"U_tip", a.U_tip}, {"v0", a.v0}, {"d0", a.d0}}}});
  }
  return j;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path.string(), "cannot open scenario file");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string(), std::string("parse error: ") + e.what());
  }
  if (j.contains("waypoints_csv") && j["waypoints_csv"].is_string()) {
    std::filesystem::path csv = j["waypoints_csv"].get<std::string>();
    if (csv.is_relative()) j["waypoints_csv"] = (path.parent_path() / csv).string();
  }
  return build_scenario(j);
}

std::string scenario_digest(const Scenario& s) {
  const std::string text = scenario_to_json(s).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int region_of(Vec2 position, const Scenario& s) {
  if (!inside(position, s.area_side))
    throw ValidationError("position", "(" + std::to_string(position.x) + ", " +
                                          std::to_string(position.y) + ") outside the area");
  const double cell = s.cell_size();
  const int col = std::min(static_cast<int>(std::floor(position.x / cell)), s.grid_dim - 1);
  const int row = std::min(static_cast<int>(std::floor(position.y / cell)), s.grid_dim - 1);
  return col + s.grid_dim * row;
}

std::vector<std::string> validate_state(const SystemState& st, const Scenario& s) {
  std::vector<std::string> out;
  const std::size_t n = s.towers.size(), m = s.uavs.size();
  if (st.tower_data.size() != n) out.push_back("tower_data size mismatch");
  if (st.uav_energy.size() != m || st.uav_active.size() != m || st.uav_position.size() != m ||
      st.uav_contents.size() != m) {
    out.push_back("uav vector size mismatch");
    return out;
  }
  if (st.regions.size() != static_cast<std::size_t>(s.region_count())) out.push_back("region count mismatch");
  for (std::size_t i = 0; i < st.tower_data.size(); ++i)
    if (!(st.tower_data[i] >= 0)) out.push_back("tower " + std::to_string(i) + ": negative data");
  for (std::size_t j = 0; j < m; ++j) {
    const std::string who = "uav " + std::to_string(j) + ": ";
    const double e = st.uav_energy[j];
    if (!(e >= 0)) out.push_back(who + "energy below zero");
    if (!(e <= s.uavs[j].battery_capacity)) out.push_back(who + "energy above capacity");
    if (st.uav_active[j] != (e > 0)) out.push_back(who + "inactive flag disagrees with energy");
    const Vec2 p = st.uav_position[j];
    if (!inside(p, s.area_side)) out.push_back(who + "position outside the area");
    for (const auto& c : st.uav_contents[j])
      if (!(c.size > 0)) out.push_back(who + "non-positive content size");
  }
  for (std::size_t r = 0; r < st.regions.size(); ++r) {
    const auto& reg = st.regions[r];
    if (reg.content_size != s.content_sizes.of(reg.event_class))
      out.push_back("region " + std::to_string(r) + ": content size does not match its class");
  }
  return out;
}

std::vector<std::string> assignment_violations(const Assignment& a, const SystemState& state,
                                               const Scenario& s) {
  std::vector<std::string> out;
  std::vector<int> load(s.towers.size(), 0);
  std::vector<int> uses(s.uavs.size(), 0);
  for (const auto& p : a.pairs) {
    if (p.tower < 0 || p.tower >= static_cast<int>(s.towers.size()) || p.uav < 0 ||
        p.uav >= static_cast<int>(s.uavs.size())) {
      out.push_back("pair " + std::to_string(p.tower) + ":" + std::to_string(p.uav) + " out of range");
      continue;
    }
    ++load[p.tower];
    ++uses[p.uav];
    if (!state.uav_active[p.uav]) out.push_back("uav " + std::to_string(p.uav) + " is inactive");
  }
  for (std::size_t i = 0; i < load.size(); ++i)
    if (load[i] > s.towers[i].panels) out.push_back("tower " + std::to_string(i) + " exceeds its panels");
  for (std::size_t j = 0; j < uses.size(); ++j)
    if (uses[j] > 1) out.push_back("uav " + std::to_string(j) + " scheduled to several towers");
  return out;
}

}  // namespace uavsched
