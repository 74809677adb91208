#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "uavsched/airframe.hpp"

namespace uavsched {

using Rng = std::mt19937_64;
using Json = nlohmann::json;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// Raised for malformed scenarios and configs. field() is a dotted path such
/// as "towers[2].position".
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, const std::string& message);
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class EventClass { kDefault = 0, kSmoke = 1, kFire = 2 };
inline constexpr int kEventClassCount = 3;

std::string_view to_string(EventClass c);
EventClass event_class_from_string(std::string_view name);

enum class RewardMode { kRaw, kNormalized };

std::string_view to_string(RewardMode m);
RewardMode reward_mode_from_string(std::string_view name);

/// Data units (MB) produced by one content for each event class.
struct ContentSizeMap {
  double default_size = 1.0;
  double smoke = 2.0;
  double fire = 4.0;

  double of(EventClass c) const;
  double max() const;
  friend bool operator==(const ContentSizeMap&, const ContentSizeMap&) = default;
};

struct Waypoint {
  double time = 0.0;  ///< seconds
  Vec2 position;
  friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

struct TowerSpec {
  int id = 0;
  Vec2 position;
  int panels = 1;             ///< H_i
  double offer_power = 100.0; ///< W offered to a scheduled UAV
  double eta_tower = 0.9;
  friend bool operator==(const TowerSpec&, const TowerSpec&) = default;
};

struct UavSpec {
  int id = 0;
  std::vector<Waypoint> waypoints;
  double speed = 20.0;                    ///< m/s
  double battery_capacity = 5.870 * 17.4 * 3600.0;  ///< J (5870 mAh at 17.4 V)
  double eta_uav = 0.9;
  Airframe airframe = Airframe::phantom4pro();
  double altitude = 100.0;  ///< m
  double fov = 90.0;        ///< degrees
  friend bool operator==(const UavSpec&, const UavSpec&) = default;
};

/// Immutable world description. Towers and UAVs are addressed by their
/// position in these vectors everywhere else in the library; `id` is a label.
struct Scenario {
  double area_side = 1250.0;
  int grid_dim = 10;
  std::vector<TowerSpec> towers;
  std::vector<UavSpec> uavs;
  double step_len = 60.0;
  int horizon = 100;
  double epsilon = 0.5;
  std::uint64_t rng_seed = 0;
  RewardMode reward_mode = RewardMode::kNormalized;
  double event_resample_prob = 0.05;
  ContentSizeMap content_sizes;
  double sigma_floor = 1e-6;
  std::optional<double> d_capacity;  ///< defaults to horizon * M * max content size

  int region_count() const { return grid_dim * grid_dim; }
  double cell_size() const { return area_side / grid_dim; }
  double data_capacity() const;
  /// Episode clock origin: the earliest first-waypoint time over all UAVs.
  double clock_origin() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct RegionState {
  int region_id = 0;
  EventClass event_class = EventClass::kDefault;
  double content_size = 1.0;
  friend bool operator==(const RegionState&, const RegionState&) = default;
};

struct Content {
  int source_region = 0;
  double size = 0.0;
  int created_at = 0;
  friend bool operator==(const Content&, const Content&) = default;
};

struct SystemState {
  int t = 0;
  std::vector<double> tower_data;
  std::vector<double> uav_energy;
  std::vector<Vec2> uav_position;
  std::vector<std::vector<Content>> uav_contents;
  std::vector<bool> uav_active;
  std::vector<RegionState> regions;
  /// Total data units ever generated; conservation is checked against it.
  double generated_total = 0.0;

  double held_by(std::size_t uav) const;
  friend bool operator==(const SystemState&, const SystemState&) = default;
};

/// One scheduled (tower, UAV) pair, both as indices.
struct Pair {
  int tower = 0;
  int uav = 0;
  friend auto operator<=>(const Pair&, const Pair&) = default;
};

/// The x_ij matrix of one step, stored sparsely as its sorted set of ones.
struct Assignment {
  std::vector<Pair> pairs;

  bool empty() const { return pairs.empty(); }
  std::size_t size() const { return pairs.size(); }
  std::optional<int> tower_of(int uav) const;
  int load_of(int tower) const;
  void add(Pair p);
  void remove(Pair p);
  std::string to_string() const;

  friend auto operator<=>(const Assignment&, const Assignment&) = default;
};

/// Default scenario: 10 UAVs on the bundled waypoint table, 5 towers in a
/// quincunx, 1250 m square split into 10x10 regions.
Scenario default_scenario();

/// The bundled waypoint table: per UAV (ids 1..10), waypoints every 600 s.
std::vector<std::vector<Waypoint>> default_waypoints();

/// Builds a validated scenario from a config tree. Missing keys take the
/// defaults of default_scenario(); unknown keys are rejected.
Scenario build_scenario(const Json& config);
Scenario load_scenario_file(const std::filesystem::path& path);
Json scenario_to_json(const Scenario& s);
void validate_scenario(const Scenario& s);

/// 64-bit FNV-1a of the canonical JSON form, as 16 hex digits.
std::string scenario_digest(const Scenario& s);

/// Row-major region id of a position; the far edges map to the last cell.
int region_of(Vec2 position, const Scenario& s);

/// Every broken SystemState invariant, one message per violation.
std::vector<std::string> validate_state(const SystemState& state, const Scenario& s);

/// Panel, uniqueness and activity checks for an assignment (reachability is
/// a scheduler concern). Empty when valid.
std::vector<std::string> assignment_violations(const Assignment& a, const SystemState& state,
                                               const Scenario& s);

}  // namespace uavsched
