#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "support.hpp"
#include "uavsched/energy.hpp"
#include "uavsched/mobility.hpp"
#include "uavsched/report.hpp"
#include "uavsched/sim.hpp"

using namespace uavsched;
using doctest::Approx;

namespace {

Scenario short_default(int horizon) {
  Scenario s = default_scenario();
  s.horizon = horizon;
  return s;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream out;
  out << f.rdbuf();
  return out.str();
}

bool all_finite(const Json& j) {
  if (j.is_number()) return std::isfinite(j.get<double>());
  if (j.is_null()) return false;
  if (j.is_structured())
    for (const auto& item : j)
      if (!all_finite(item)) return false;
  return true;
}

}  // namespace

TEST_CASE("step examples") {
  const Scenario s = testing::toy_scenario({{0, 0}, {600, 600}}, {{100, 0}, {500, 500}});
  const auto trajs = trajectories(s);
  SystemState st = testing::fresh_state(s);
  const double hover60 = hover_power(Airframe::phantom4pro()) * 60;

  SUBCASE("empty assignment only burns energy") {
    Rng ev(1);
    auto [next, rec] = step(st, {}, s, trajs, ev);
    CHECK(next.tower_data == st.tower_data);
    for (int j = 0; j < 2; ++j) CHECK(next.uav_energy[j] == Approx(st.uav_energy[j] - hover60));
    CHECK(rec.t == 0);
    CHECK(next.t == 1);
    CHECK(rec.generated.size() == 2);  // both parked UAVs hover
  }
  SUBCASE("a scheduled pair delivers everything it holds") {
    testing::give(st, 0, {2, 3});
    Rng ev(1);
    auto [next, rec] = step(st, Assignment{{{0, 0}}}, s, trajs, ev);
    CHECK(next.tower_data[0] == 5.0);
    CHECK(next.tower_data[1] == 0.0);
    CHECK(next.uav_contents[0].empty());
    CHECK(rec.tower_data == next.tower_data);
  }
  SUBCASE("running dry deactivates") {
    st.uav_energy[1] = hover60 - 50;
    Rng ev(1);
    auto [next, rec] = step(st, {}, s, trajs, ev);
    CHECK(next.uav_energy[1] == 0.0);
    CHECK_FALSE(next.uav_active[1]);
    CHECK(rec.deactivated == std::vector<int>{1});
    CHECK(validate_state(next, s).empty());
    Rng ev2(1);
    CHECK_THROWS_AS(step(next, Assignment{{{1, 1}}}, s, trajs, ev2), InfeasiblePairError);
  }
}

TEST_CASE("idle UAVs lose energy every step until they stop") {
  const Scenario s = short_default(100);
  const auto trajs = trajectories(s);
  Rng ev(3);
  SystemState st = initial_state(s, ev);
  for (int t = 0; t < 100; ++t) {
    auto [next, rec] = step(st, {}, s, trajs, ev);
    for (std::size_t j = 0; j < s.uavs.size(); ++j) {
      if (st.uav_energy[j] > 0)
        CHECK(next.uav_energy[j] < st.uav_energy[j]);
      else
        CHECK(next.uav_energy[j] == 0.0);
    }
    st = std::move(next);
  }
}

TEST_CASE("episodes are deterministic and replayable") {
  const Scenario s = short_default(30);
  for (const Policy& p : {Policy::proposed(0.5), Policy::comp1(), Policy::comp2(), Policy::comp3()}) {
    const auto a = run_episode(s, p, 11, {true});
    const auto b = run_episode(s, p, 11, {true});
    CHECK(a == b);
    CHECK(to_ndjson(a) == to_ndjson(b));
    CHECK(replay_episode(s, a) == a);
  }
  CHECK(to_ndjson(run_episode(s, Policy::comp3(), 11)) != to_ndjson(run_episode(s, Policy::proposed(), 11)));
  CHECK(to_ndjson(run_episode(s, Policy::comp3(), 11)) != to_ndjson(run_episode(s, Policy::comp3(), 12)));
}

TEST_CASE("horizon zero is rejected") {
  Scenario s = default_scenario();
  s.horizon = 0;
  CHECK_THROWS_AS(run_episode(s, Policy::proposed(), 0), ValidationError);
}

TEST_CASE("energy ledger recomputed from the log") {
  const Scenario s = short_default(100);
  const auto trajs = trajectories(s);
  const auto log = run_episode(s, Policy::proposed(0.5), 4);
  std::vector<double> e(s.uavs.size());
  std::vector<Vec2> pos(s.uavs.size());
  for (std::size_t j = 0; j < e.size(); ++j) {
    e[j] = s.uavs[j].battery_capacity;
    pos[j] = s.uavs[j].waypoints.front().position;
  }
  for (const auto& r : log.records) {
    const double t0 = clock_at(s, r.t);
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (e[j] <= 0) continue;
      const auto& u = s.uavs[j];
      std::optional<double> dist;
      double charged = 0;
      if (auto i = r.assignment.tower_of(static_cast<int>(j))) {
        const auto& tw = s.towers[*i];
        dist = distance(tw.position, pos[j]);
        charged = charge_amount(tw.offer_power, tw.eta_tower, u.eta_uav, s.step_len, *dist / u.speed);
      }
      e[j] = std::max(0.0, apply_charge(e[j], charged, u.battery_capacity) -
                               step_consumption(u, trajs[j], t0, dist, s.step_len));
      if (e[j] > 0) pos[j] = trajs[j].position_clamped(t0 + s.step_len);
      CHECK(r.uav_energy[j] == Approx(e[j]).epsilon(1e-12));
    }
  }
}

TEST_CASE("tower data never decreases and invariants hold for every policy") {
  const Scenario s = short_default(100);
  for (const Policy& p : {Policy::proposed(0.5), Policy::comp1(), Policy::comp2(), Policy::comp3()})
    for (std::uint64_t seed : {0u, 1u}) {
      const auto log = run_episode(s, p, seed, {true});
      for (std::size_t t = 1; t < log.records.size(); ++t)
        for (std::size_t i = 0; i < s.towers.size(); ++i)
          CHECK(log.records[t].tower_data[i] >= log.records[t - 1].tower_data[i]);
      CHECK(all_finite(to_json(log)));
    }
}

TEST_CASE("quantiles") {
  const Quantiles q = quantiles({5, 1, 4, 2, 3});
  CHECK(q.min == 1);
  CHECK(q.q1 == 2);
  CHECK(q.median == 3);
  CHECK(q.q3 == 4);
  CHECK(q.max == 5);
  const Quantiles even = quantiles({1, 2});
  CHECK(even.q1 == 1.25);
  CHECK(even.median == 1.5);
  CHECK_THROWS(quantiles({}));
}

TEST_CASE("summaries") {
  const Scenario one = short_default(1);
  const auto log = run_episode(one, Policy::proposed(), 2);
  REQUIRE(log.records.size() == 1);
  const std::vector<EpisodeLog> single{log};
  const auto stats = summarize(single);
  const auto& r = log.records[0];
  CHECK(stats.mean_energy.size() == 1);
  CHECK(stats.mean_energy[0] == Approx(std::accumulate(r.uav_energy.begin(), r.uav_energy.end(), 0.0) / 10));
  CHECK(stats.tower_data[0] == r.tower_data);
  CHECK(stats.reward_normalized[0] == Approx(r.reward.combined));
  CHECK(stats.system_value == log.system_value);
  for (const auto& q : stats.tower_quantiles) {
    CHECK(q.min <= q.q1);
    CHECK(q.q1 <= q.median);
    CHECK(q.median <= q.q3);
    CHECK(q.q3 <= q.max);
  }

  const Scenario s = short_default(20);
  const auto a = run_episode(s, Policy::comp3(), 5);
  const std::vector<EpisodeLog> once{a}, twice{a, a};
  CHECK(summarize(twice).mean_energy == summarize(once).mean_energy);
  CHECK(summarize(twice).tower_quantiles == summarize(once).tower_quantiles);
  CHECK(summarize(twice).system_value == summarize(once).system_value);

  const std::vector<EpisodeLog> mixed{a, log};
  CHECK_THROWS(summarize(mixed));
}

TEST_CASE("truncated episodes are padded to the horizon") {
  const Scenario s = short_default(100);
  const auto log = run_episode(s, Policy::comp2(), 0);
  REQUIRE(log.truncated);
  const std::vector<EpisodeLog> one{log};
  const auto stats = summarize(one);
  CHECK(stats.mean_energy.size() == 100);
  CHECK(stats.tower_data.back() == log.records.back().tower_data);
}

TEST_CASE("exports") {
  const Scenario s = short_default(12);
  const auto c = compare(s, {Policy::proposed(), Policy::comp3()}, {0, 1, 2});
  const auto& stats = c.runs.front().summary;

  const Json j = to_json(stats);
  const auto back = summary_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(back.mean_energy.size() == stats.mean_energy.size());
  CHECK(back.policy == stats.policy);
  CHECK(all_finite(j));
  CHECK(all_finite(to_json(c)));

  const std::string csv = to_csv(stats);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 12);

  const auto dir = std::filesystem::temp_directory_path() / "uavsched_export_test";
  std::filesystem::remove_all(dir);
  export_summary(stats, dir / "a.json");
  export_summary(summarize(compare(s, {Policy::proposed()}, {0, 1, 2}).runs.front().logs), dir / "b.json");
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  export_log(c.runs.back().logs[0], dir / "log.ndjson");
  export_log(run_episode(s, Policy::comp3(), 0), dir / "log2.ndjson");
  CHECK(slurp(dir / "log.ndjson") == slurp(dir / "log2.ndjson"));
  std::filesystem::remove_all(dir);

  CHECK_THROWS(write_file("/proc/uavsched/nope.json", "x"));
}

TEST_CASE("compare with one policy and one seed") {
  const Scenario s = short_default(15);
  const auto c = compare(s, {Policy::proposed()}, {0});
  REQUIRE(c.runs.size() == 1);
  CHECK(c.orderings.empty());
  const auto log = run_episode(s, Policy::proposed(), 0);
  CHECK(c.runs[0].logs[0] == log);
  const std::vector<EpisodeLog> one{log};
  CHECK(c.runs[0].summary == summarize(one));
  const std::string table = comparison_table(c);
  CHECK(std::count(table.begin(), table.end(), '\n') == 2);
  CHECK_THROWS(compare(s, {Policy::proposed()}, {}));
}

TEST_CASE("orderings are reported for the four standard policies") {
  const Scenario s = short_default(10);
  const auto c = compare(s, {Policy::proposed(), Policy::comp1(), Policy::comp2(), Policy::comp3()}, {0, 1});
  CHECK(c.orderings.size() == 8);
  for (const auto& o : c.orderings) CHECK(o.total == 2);
}
