#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "support.hpp"
#include "uavsched/domain.hpp"
#include "uavsched/mobility.hpp"

using namespace uavsched;

namespace {

std::string field_of(const Json& cfg) {
  try {
    build_scenario(cfg);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("empty config yields the default scenario") {
  const Scenario s = build_scenario(Json::object());
  CHECK(s.uavs.size() == 10);
  CHECK(s.towers.size() == 5);
  CHECK(s.area_side == 1250.0);
  CHECK(s.region_count() == 100);
  CHECK(s.horizon == 100);
  CHECK(s.step_len == 60.0);
  CHECK(s == default_scenario());
}

TEST_CASE("validation errors name the offending field") {
  CHECK(field_of({{"epsilon", 1.3}}) == "epsilon");
  CHECK(field_of({{"epsilon", -0.1}}) == "epsilon");
  CHECK(field_of({{"grid_dim", 0}}) == "grid_dim");
  CHECK(field_of({{"horizon", 0}}) == "horizon");
  CHECK(field_of({{"bogus", 1}}) == "bogus");
  Json cfg = scenario_to_json(default_scenario());
  cfg["towers"][2]["position"] = {2000.0, 10.0};
  CHECK(field_of(cfg) == "towers[2].position");
  cfg = scenario_to_json(default_scenario());
  cfg["uavs"][0]["waypoints"][1]["time"] = 601.0;  // 500 m leg in one second
  CHECK(field_of(cfg).rfind("uavs[0].waypoints", 0) == 0);
}

TEST_CASE("two towers, two UAVs, grid 2 gives four regions") {
  Json cfg = scenario_to_json(default_scenario());
  cfg["towers"] = Json::array({cfg["towers"][0], cfg["towers"][1]});
  cfg["uavs"] = Json::array({cfg["uavs"][0], cfg["uavs"][1]});
  cfg["grid_dim"] = 2;
  const Scenario s = build_scenario(cfg);
  CHECK(s.region_count() == 4);
  CHECK(s.towers.size() == 2);
  CHECK(s.uavs.size() == 2);
}

TEST_CASE("scenario round-trip through JSON and files") {
  Scenario s = default_scenario();
  s.epsilon = 0.25;
  s.reward_mode = RewardMode::kRaw;
  s.d_capacity = 1234.5;
  s.towers[3].panels = 2;
  CHECK(build_scenario(scenario_to_json(s)) == s);
  CHECK(scenario_digest(build_scenario(scenario_to_json(s))) == scenario_digest(s));
  CHECK(scenario_digest(s) != scenario_digest(default_scenario()));

  const auto path = std::filesystem::temp_directory_path() / "uavsched_roundtrip.json";
  std::ofstream(path) << scenario_to_json(s).dump(2);
  CHECK(load_scenario_file(path) == s);
  std::filesystem::remove(path);
}

TEST_CASE("bundled waypoint CSV equals the built-in table") {
  const std::filesystem::path csv = std::filesystem::path(UAVSCHED_DATA_DIR) / "waypoints.csv";
  const auto table = load_waypoints_csv(csv);
  const auto builtin = default_waypoints();
  REQUIRE(table.size() == 10);
  for (int j = 0; j < 10; ++j) CHECK(table.at(j + 1) == builtin[j]);
  const Scenario s = load_scenario_file(std::filesystem::path(UAVSCHED_DATA_DIR) / "default_scenario.json");
  CHECK(s == default_scenario());
}

TEST_CASE("region_of examples") {
  const Scenario s = default_scenario();
  CHECK(region_of({0, 0}, s) == 0);
  CHECK(region_of({130, 10}, s) == 1);
  CHECK(region_of({1250, 1250}, s) == 99);
  CHECK(region_of({10, 130}, s) == 10);
}

TEST_CASE("regions partition a 250 m area on a 1 m lattice") {
  Scenario s = testing::toy_scenario({{10, 10}}, {{20, 20}});
  s.area_side = 250.0;
  s.grid_dim = 5;
  const double cell = 50.0;
  std::map<int, int> hits;
  for (int x = 0; x <= 250; ++x)
    for (int y = 0; y <= 250; ++y) {
      const int r = region_of({static_cast<double>(x), static_cast<double>(y)}, s);
      REQUIRE(r >= 0);
      REQUIRE(r < 25);
      // brute-force scan: the unique half-open cell that holds the point,
      // with the far edges closed
      int owner = -1, owners = 0;
      for (int row = 0; row < 5; ++row)
        for (int col = 0; col < 5; ++col) {
          const bool in_x = x >= col * cell && (x < (col + 1) * cell || (col == 4 && x <= 250));
          const bool in_y = y >= row * cell && (y < (row + 1) * cell || (row == 4 && y <= 250));
          if (in_x && in_y) {
            owner = row * 5 + col;
            ++owners;
          }
        }
      REQUIRE(owners == 1);
      REQUIRE(r == owner);
      ++hits[r];
    }
  CHECK(hits.size() == 25);
}

TEST_CASE("validate_state examples") {
  const Scenario s = default_scenario();
  SystemState st = testing::fresh_state(s);
  CHECK(validate_state(st, s).empty());

  SystemState neg = st;
  neg.uav_energy[3] = -1.0;
  auto bad = validate_state(neg, s);
  REQUIRE_FALSE(bad.empty());
  CHECK(bad.front().find("energy below zero") != std::string::npos);

  SystemState flag = st;
  flag.uav_energy[2] = 0.0;
  bad = validate_state(flag, s);
  REQUIRE_FALSE(bad.empty());
  CHECK(bad.front().find("inactive flag") != std::string::npos);
}

TEST_CASE("assignment bookkeeping") {
  Assignment a;
  a.add({1, 4});
  a.add({0, 2});
  CHECK(a.to_string() == "0:2;1:4");
  CHECK(a.tower_of(4) == 1);
  CHECK_FALSE(a.tower_of(3).has_value());
  CHECK(a.load_of(0) == 1);
  a.remove({0, 2});
  CHECK(a.to_string() == "1:4");
  CHECK(Assignment{}.to_string() == "-");

  const Scenario s = default_scenario();
  SystemState st = testing::fresh_state(s);
  Assignment twice;
  twice.add({0, 1});
  twice.add({1, 1});
  CHECK_FALSE(assignment_violations(twice, st, s).empty());
  Assignment crowded;
  crowded.add({0, 1});
  crowded.add({0, 2});
  CHECK_FALSE(assignment_violations(crowded, st, s).empty());
  st.uav_active[5] = false;
  st.uav_energy[5] = 0.0;
  Assignment dead;
  dead.add({0, 5});
  CHECK_FALSE(assignment_violations(dead, st, s).empty());
}
