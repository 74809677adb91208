#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "uavsched/domain.hpp"
#include "uavsched/sim.hpp"

namespace testing {

using namespace uavsched;

/// UAV parked at `p` for the whole episode (always hovering).
inline UavSpec parked_uav(int id, Vec2 p) {
  UavSpec u;
  u.id = id;
  u.waypoints = {{0.0, p}, {1e6, p}};
  return u;
}

inline Scenario toy_scenario(const std::vector<Vec2>& towers, const std::vector<Vec2>& uavs,
                             int horizon = 10) {
  Scenario s;
  s.horizon = horizon;
  for (std::size_t i = 0; i < towers.size(); ++i)
    s.towers.push_back(TowerSpec{.id = static_cast<int>(i + 1), .position = towers[i]});
  for (std::size_t j = 0; j < uavs.size(); ++j) s.uavs.push_back(parked_uav(static_cast<int>(j + 1), uavs[j]));
  return s;
}

inline SystemState fresh_state(const Scenario& s, std::uint64_t seed = 1) {
  Rng rng(seed);
  return initial_state(s, rng);
}

inline void give(SystemState& st, int uav, std::vector<double> sizes) {
  for (double d : sizes) {
    st.uav_contents[uav].push_back({0, d, 0});
    st.generated_total += d;
  }
}

/// Random small world: up to `max_towers` towers and `max_uavs` UAVs
/// scattered in the area, random battery and stored data.
inline std::pair<Scenario, SystemState> random_world(Rng& rng, int max_towers, int max_uavs) {
  std::uniform_int_distribution<int> nt(1, max_towers), nu(1, max_uavs), panels(1, 2), items(0, 3);
  std::uniform_real_distribution<double> pos(0.0, 1250.0), frac(0.05, 1.0), coin(0.0, 1.0);
  std::vector<Vec2> towers, uavs;
  const int n_t = nt(rng), n_u = nu(rng);
  for (int i = 0; i < n_t; ++i) towers.push_back({pos(rng), pos(rng)});
  for (int j = 0; j < n_u; ++j) uavs.push_back({pos(rng), pos(rng)});
  Scenario s = toy_scenario(towers, uavs);
  s.step_len = 120.0;  // widen reach so most pairs are feasible
  for (auto& t : s.towers) t.panels = panels(rng);
  SystemState st = fresh_state(s, rng());
  for (int i = 0; i < n_t; ++i) st.tower_data[i] = std::floor(coin(rng) * 8.0);
  for (int j = 0; j < n_u; ++j) {
    st.uav_energy[j] = frac(rng) * s.uavs[j].battery_capacity;
    const int k = items(rng);
    for (int c = 0; c < k; ++c) give(st, j, {static_cast<double>(1 << std::uniform_int_distribution<int>(0, 2)(rng))});
  }
  return {s, st};
}

}  // namespace testing
