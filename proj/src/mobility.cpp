#include "uavsched/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace uavsched {

std::vector<std::string> airframe_errors(const Airframe& a) {
  std::vector<std::string> bad;
  auto check = [&](double v, const char* name) {
    if (!(v > 0)) bad.emplace_back(name);
  };
  check(a.delta, "delta");
  check(a.rho, "rho");
  check(a.s, "s");
  check(a.A, "A");
  check(a.Omega, "Omega");
  check(a.R, "R");
  check(a.k, "k");
  check(a.W, "W");
  check(a.U_tip, "U_tip");
  check(a.v0, "v0");
  check(a.d0, "d0");
  return bad;
}

bool tip_speed_consistent(const Airframe& a) {
  return std::abs(a.Omega * a.R - a.U_tip) <= 0.01 * a.U_tip;
}

double surveillance_radius(double altitude, double fov_deg) {
  if (!(fov_deg > 0 && fov_deg < 180)) throw ValidationError("fov", "must lie in (0, 180) degrees");
  if (!(altitude >= 0)) throw ValidationError("altitude", "must be >= 0");
  return altitude * std::tan(fov_deg * std::numbers::pi / 360.0);
}

double surveillance_area(double altitude, double fov_deg) {
  const double r = surveillance_radius(altitude, fov_deg);
  return std::numbers::pi * r * r;
}

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double travel_time(double distance_m, double speed) {
  if (!(speed > 0)) throw ValidationError("speed", "must be > 0");
  return distance_m / speed;
}

Trajectory::Trajectory(std::vector<Waypoint> waypoints, double speed)
    : waypoints_(std::move(waypoints)), speed_(speed) {
  if (waypoints_.empty()) throw ValidationError("waypoints", "at least one waypoint required");
  if (!(speed_ > 0)) throw ValidationError("speed", "must be > 0");
  for (std::size_t k = 0; k + 1 < waypoints_.size(); ++k) {
    const auto& a = waypoints_[k];
    const auto& b = waypoints_[k + 1];
    if (!(b.time > a.time))
      throw ValidationError("waypoints[" + std::to_string(k + 1) + "].time", "not strictly increasing");
    const double arrive = a.time + distance(a.position, b.position) / speed_;
    if (arrive > b.time)
      throw ValidationError("waypoints[" + std::to_string(k + 1) + "]", "unreachable in time");
    segments_.push_back({a.time, a.position, b.position, arrive, b.time});
  }
}

Vec2 Trajectory::position_at(double time) const {
  if (time < start_time() || time > end_time())
    throw ValidationError("time", std::to_string(time) + " s outside the trajectory span");
  return position_clamped(time);
}

Vec2 Trajectory::position_clamped(double time) const {
  if (time <= start_time()) return waypoints_.front().position;
  if (time >= end_time()) return waypoints_.back().position;
  auto it = std::upper_bound(segments_.begin(), segments_.end(), time,
                             [](double t, const Segment& s) { return t < s.depart; });
  const Segment& seg = *std::prev(it);
  if (time >= seg.arrive) return seg.to;
  const double f = (time - seg.depart) / (seg.arrive - seg.depart);
  return {seg.from.x + f * (seg.to.x - seg.from.x), seg.from.y + f * (seg.to.y - seg.from.y)};
}

FlightSplit Trajectory::split(double t0, double t1) const {
  FlightSplit out;
  if (t1 <= t0) return out;
  double flight = 0.0;
  for (const auto& seg : segments_) {
    const double lo = std::max(t0, seg.depart);
    const double hi = std::min(t1, seg.arrive);
    if (hi > lo) flight += hi - lo;
  }
  out.flight = flight;
  out.dwell = (t1 - t0) - flight;
  return out;
}

Vec2 position_at(const Trajectory& trajectory, double time) { return trajectory.position_at(time); }

std::vector<Trajectory> trajectories(const Scenario& s) {
  std::vector<Trajectory> out;
  out.reserve(s.uavs.size());
  for (const auto& u : s.uavs) out.emplace_back(u.waypoints, u.speed);
  return out;
}

std::map<int, std::vector<Waypoint>> load_waypoints_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path.string(), "cannot open waypoint table");
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path.string(), "empty waypoint table");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "time_min,uav_id,x,y")
    throw ValidationError(path.string(), "expected header 'time_min,uav_id,x,y'");
  std::map<int, std::vector<Waypoint>> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell[4];
    for (auto& c : cell) std::getline(ss, c, ',');
    try {
      const double minutes = std::stod(cell[0]);
      const int id = std::stoi(cell[1]);
      out[id].push_back({minutes * 60.0, {std::stod(cell[2]), std::stod(cell[3])}});
    } catch (const std::exception&) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno), "malformed row");
    }
  }
  for (auto& [id, wps] : out)
    std::stable_sort(wps.begin(), wps.end(), [](const Waypoint& a, const Waypoint& b) { return a.time < b.time; });
  return out;
}

}  // namespace uavsched
