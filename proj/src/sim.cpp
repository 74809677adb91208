#include "uavsched/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "uavsched/contents.hpp"
#include "uavsched/energy.hpp"
#include "uavsched/format.hpp"
#include "uavsched/mobility.hpp"

namespace uavsched {

EpisodeStreams::EpisodeStreams(std::uint64_t seed) {
  std::seed_seq ev{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x45u};
  std::seed_seq dec{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x44u};
  events.seed(ev);
  decisions.seed(dec);
}

double clock_at(const Scenario& s, int t) { return s.clock_origin() + t * s.step_len; }

SystemState initial_state(const Scenario& s, Rng& events) {
  SystemState st;
  st.tower_data.assign(s.towers.size(), 0.0);
  for (const auto& u : s.uavs) {
    st.uav_energy.push_back(u.battery_capacity);
    st.uav_position.push_back(u.waypoints.front().position);
    st.uav_contents.emplace_back();
    st.uav_active.push_back(true);
  }
  st.regions = initial_regions(s, events);
  return st;
}

void apply_exchange(SystemState& st, const Assignment& a, const Scenario& s,
                    const std::vector<Trajectory>& trajs, std::vector<int>* deactivated) {
  if (auto bad = assignment_violations(a, st, s); !bad.empty())
    throw InfeasiblePairError("infeasible assignment " + a.to_string() + ": " + bad.front());

  const double t0 = clock_at(s, st.t);
  std::vector<std::optional<double>> trip(s.uavs.size());
  for (const auto& p : a.pairs) {
    const auto& uav = s.uavs[p.uav];
    const double d = distance(s.towers[p.tower].position, st.uav_position[p.uav]);
    if (2.0 * travel_time(d, uav.speed) > s.step_len)
      throw InfeasiblePairError("pair " + std::to_string(p.tower) + ":" + std::to_string(p.uav) +
                                " is out of round-trip reach");
    trip[p.uav] = d;
  }

  for (const auto& p : a.pairs) transfer_contents(st, p.tower, p.uav);

  for (const auto& p : a.pairs) {
    const auto& uav = s.uavs[p.uav];
    const auto& tower = s.towers[p.tower];
    const double ec = charge_amount(tower.offer_power, tower.eta_tower, uav.eta_uav, s.step_len,
                                    travel_time(*trip[p.uav], uav.speed));
    st.uav_energy[p.uav] = apply_charge(st.uav_energy[p.uav], ec, uav.battery_capacity);
  }

  for (std::size_t j = 0; j < s.uavs.size(); ++j) {
    if (!st.uav_active[j]) continue;
    const double used = step_consumption(s.uavs[j], trajs[j], t0, trip[j], s.step_len);
    const double e = st.uav_energy[j] - used;
    if (e <= 0.0) {
      st.uav_energy[j] = 0.0;
      st.uav_active[j] = false;
      if (deactivated) deactivated->push_back(static_cast<int>(j));
    } else {
      st.uav_energy[j] = e;
    }
  }
}

RewardBreakdown state_reward(const SystemState& st, const Scenario& s, double epsilon) {
  std::vector<double> cap;
  cap.reserve(s.uavs.size());
  for (const auto& u : s.uavs) cap.push_back(u.battery_capacity);
  return combined_reward(epsilon, {st.tower_data, st.uav_energy, cap}, s.reward_mode,
                         s.data_capacity(), s.sigma_floor);
}

std::pair<SystemState, StepRecord> step(const SystemState& state, const Assignment& assignment,
                                        const Scenario& s, Rng& events) {
  return step(state, assignment, s, trajectories(s), events);
}

std::pair<SystemState, StepRecord> step(const SystemState& state, const Assignment& assignment,
                                        const Scenario& s, const std::vector<Trajectory>& trajs,
                                        Rng& events) {
  SystemState next = state;
  StepRecord rec;
  rec.t = state.t;
  rec.assignment = assignment;

  apply_exchange(next, assignment, s, trajs, &rec.deactivated);

  const double t0 = clock_at(s, state.t);
  const double t1 = t0 + s.step_len;
  for (std::size_t j = 0; j < s.uavs.size(); ++j) {
    if (!next.uav_active[j]) continue;
    next.uav_position[j] = trajs[j].position_clamped(t1);
  }

  for (std::size_t j = 0; j < s.uavs.size(); ++j) {
    if (!next.uav_active[j]) continue;
    const bool scheduled = assignment.tower_of(static_cast<int>(j)).has_value();
    const bool dwelled = trajs[j].split(t0, t1).dwell > 0.0;
    if (auto c = generate_content(next.uav_position[j], dwelled, scheduled, next.regions, s, state.t)) {
      next.uav_contents[j].push_back(*c);
      next.generated_total += c->size;
      rec.generated.push_back({static_cast<int>(j), *c});
    }
  }

  sample_region_events(next.regions, s.event_resample_prob, s.content_sizes, events);

  rec.reward = state_reward(next, s, s.epsilon);
  next.t = state.t + 1;
  rec.tower_data = next.tower_data;
  rec.uav_energy = next.uav_energy;
  return {std::move(next), std::move(rec)};
}

namespace {

void check_invariants(const SystemState& before, const SystemState& after, const Scenario& s) {
  auto bad = validate_state(after, s);
  double stored = std::accumulate(after.tower_data.begin(), after.tower_data.end(), 0.0);
  for (std::size_t j = 0; j < after.uav_contents.size(); ++j) stored += after.held_by(j);
  if (std::abs(stored - after.generated_total) > 1e-9 * std::max(1.0, after.generated_total))
    bad.push_back("data conservation broken: stored " + std::to_string(stored) + " vs generated " +
                  std::to_string(after.generated_total));
  for (std::size_t i = 0; i < after.tower_data.size(); ++i)
    if (after.tower_data[i] < before.tower_data[i])
      bad.push_back("tower " + std::to_string(i) + " lost data");
  if (!bad.empty()) throw std::logic_error("invariant violated at t=" + std::to_string(after.t) + ": " + bad.front());
}

void finish(EpisodeLog& log) {
  std::vector<double> series;
  for (const auto& r : log.records) series.push_back(r.reward.combined);
  log.system_value = system_value_timeavg(series);
}

}  // namespace

EpisodeLog run_episode(const Scenario& s, const Policy& policy, std::uint64_t seed,
                       const EpisodeOptions& options) {
  validate_scenario(s);
  EpisodeStreams streams(seed);
  const auto trajs = trajectories(s);
  EpisodeLog log;
  log.scenario_digest = scenario_digest(s);
  log.seed = seed;
  log.policy = policy.name();
  log.epsilon = s.epsilon;
  log.horizon = s.horizon;

  SystemState state = initial_state(s, streams.events);
  for (int t = 0; t < s.horizon; ++t) {
    if (std::none_of(state.uav_active.begin(), state.uav_active.end(), [](bool a) { return a; })) {
      log.truncated = true;
      break;
    }
    const Assignment a = decide(policy, state, s, streams.decisions);
    auto [next, rec] = step(state, a, s, trajs, streams.events);
    if (options.check_invariants) check_invariants(state, next, s);
    state = std::move(next);
    log.records.push_back(std::move(rec));
  }
  finish(log);
  return log;
}

EpisodeLog replay_episode(const Scenario& s, const EpisodeLog& original) {
  EpisodeStreams streams(original.seed);
  const auto trajs = trajectories(s);
  EpisodeLog log;
  log.scenario_digest = scenario_digest(s);
  log.seed = original.seed;
  log.policy = original.policy;
  log.epsilon = s.epsilon;
  log.horizon = s.horizon;
  log.truncated = original.truncated;
  SystemState state = initial_state(s, streams.events);
  for (const auto& r : original.records) {
    auto [next, rec] = step(state, r.assignment, s, trajs, streams.events);
    state = std::move(next);
    log.records.push_back(std::move(rec));
  }
  finish(log);
  return log;
}

Json to_json(const StepRecord& r) {
  Json pairs = Json::array();
  for (const auto& p : r.assignment.pairs) pairs.push_back({p.tower, p.uav});
  Json gen = Json::array();
  for (const auto& g : r.generated)
    gen.push_back({{"uav", g.uav}, {"region", g.content.source_region}, {"size", g.content.size}});
  return rounded(Json{{"t", r.t},
                      {"assignment", pairs},
                      {"reward",
                       {{"r_tower_raw", r.reward.r_tower_raw},
                        {"r_uav_raw", r.reward.r_uav_raw},
                        {"r_tower_norm", r.reward.r_tower_norm},
                        {"r_uav_norm", r.reward.r_uav_norm},
                        {"combined", r.reward.combined}}},
                      {"tower_data", r.tower_data},
                      {"uav_energy", r.uav_energy},
                      {"generated", gen},
                      {"deactivated", r.deactivated}});
}

namespace {

Json header_json(const EpisodeLog& log) {
  return rounded(Json{{"scenario_digest", log.scenario_digest},
                      {"seed", log.seed},
                      {"policy", log.policy},
                      {"epsilon", log.epsilon},
                      {"horizon", log.horizon},
                      {"steps", log.records.size()},
                      {"truncated", log.truncated},
                      {"system_value", log.system_value}});
}

}  // namespace

Json to_json(const EpisodeLog& log) {
  Json j = header_json(log);
  j["records"] = Json::array();
  for (const auto& r : log.records) j["records"].push_back(to_json(r));
  return j;
}

std::string to_ndjson(const EpisodeLog& log) {
  std::string out = header_json(log).dump() + "\n";
  for (const auto& r : log.records) out += to_json(r).dump() + "\n";
  return out;
}

std::string to_csv(const EpisodeLog& log) {
  std::ostringstream out;
  const std::size_t n = log.records.empty() ? 0 : log.records.front().tower_data.size();
  out << "t,r_tower_raw,r_uav_raw,r_tower_norm,r_uav_norm,combined,mean_energy,pairs";
  for (std::size_t i = 0; i < n; ++i) out << ",tower_" << i;
  out << "\n";
  for (const auto& r : log.records) {
    const double mean_e =
        r.uav_energy.empty() ? 0.0
                             : std::accumulate(r.uav_energy.begin(), r.uav_energy.end(), 0.0) /
                                   static_cast<double>(r.uav_energy.size());
    out << r.t << ',' << format6(r.reward.r_tower_raw) << ',' << format6(r.reward.r_uav_raw) << ','
        << format6(r.reward.r_tower_norm) << ',' << format6(r.reward.r_uav_norm) << ','
        << format6(r.reward.combined) << ',' << format6(mean_e) << ',' << r.assignment.size();
    for (double d : r.tower_data) out << ',' << format6(d);
    out << "\n";
  }
  return out.str();
}

}  // namespace uavsched
