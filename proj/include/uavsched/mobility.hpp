#pragma once

#include <filesystem>
#include <map>
#include <vector>

#include "uavsched/domain.hpp"

namespace uavsched {

/// Radius of the ground footprint seen by a camera at `altitude` with the
/// given full field of view in degrees.
double surveillance_radius(double altitude, double fov_deg);
double surveillance_area(double altitude, double fov_deg);

double distance(Vec2 a, Vec2 b);
double travel_time(double distance_m, double speed);

/// One leg between consecutive waypoints: fly at constant speed from
/// `depart`, arrive at `arrive`, then hover until `next_depart`.
struct Segment {
  double depart = 0.0;
  Vec2 from;
  Vec2 to;
  double arrive = 0.0;
  double next_depart = 0.0;
};

/// Seconds spent flying and hovering inside a time window.
struct FlightSplit {
  double flight = 0.0;
  double dwell = 0.0;
};

class Trajectory {
 public:
  /// Throws ValidationError when times are not strictly increasing or a leg
  /// cannot be flown before the next waypoint time.
  Trajectory(std::vector<Waypoint> waypoints, double speed);

  double start_time() const { return waypoints_.front().time; }
  double end_time() const { return waypoints_.back().time; }
  double speed() const { return speed_; }
  const std::vector<Waypoint>& waypoints() const { return waypoints_; }
  const std::vector<Segment>& segments() const { return segments_; }

  /// Position at an absolute time inside [start_time, end_time].
  Vec2 position_at(double time) const;

  /// Like position_at, but holds the first/last waypoint outside the span.
  Vec2 position_clamped(double time) const;

  /// Flight/hover split over [t0, t1]; time outside the span counts as hover.
  FlightSplit split(double t0, double t1) const;

 private:
  std::vector<Waypoint> waypoints_;
  std::vector<Segment> segments_;
  double speed_;
};

Vec2 position_at(const Trajectory& trajectory, double time);

std::vector<Trajectory> trajectories(const Scenario& s);

/// Reads a waypoint table with header `time_min,uav_id,x,y`. Returns
/// waypoints keyed by UAV id, times converted to seconds.
std::map<int, std::vector<Waypoint>> load_waypoints_csv(const std::filesystem::path& path);

}  // namespace uavsched
