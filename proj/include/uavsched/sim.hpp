#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "uavsched/domain.hpp"
#include "uavsched/mobility.hpp"
#include "uavsched/reward.hpp"
#include "uavsched/scheduler.hpp"

namespace uavsched {

struct GeneratedContent {
  int uav = 0;
  Content content;
  friend bool operator==(const GeneratedContent&, const GeneratedContent&) = default;
};

struct StepRecord {
  int t = 0;  ///< index of the step this record closes
  Assignment assignment;
  RewardBreakdown reward;
  std::vector<double> tower_data;
  std::vector<double> uav_energy;
  std::vector<GeneratedContent> generated;
  std::vector<int> deactivated;
  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct EpisodeLog {
  std::string scenario_digest;
  std::uint64_t seed = 0;
  std::string policy;
  double epsilon = 0.5;  ///< weight used for the recorded rewards
  int horizon = 0;
  std::vector<StepRecord> records;
  bool truncated = false;  ///< every UAV ran dry before the horizon
  double system_value = 0.0;
  friend bool operator==(const EpisodeLog&, const EpisodeLog&) = default;
};

/// Independent rng streams of one episode.
struct EpisodeStreams {
  Rng events;
  Rng decisions;
  explicit EpisodeStreams(std::uint64_t seed);
};

/// Episode clock (absolute trajectory time) at the start of step t.
double clock_at(const Scenario& s, int t);

/// Full batteries, empty towers, UAVs at their first waypoints, regions
/// drawn from `events`.
SystemState initial_state(const Scenario& s, Rng& events);

/// Deterministic part of a step: transfer, charge, consume (with
/// deactivation). Positions, contents generation and events untouched.
/// Throws InfeasiblePairError for pairs that break the step's rules.
void apply_exchange(SystemState& state, const Assignment& assignment, const Scenario& s,
                    const std::vector<Trajectory>& trajectories,
                    std::vector<int>* deactivated = nullptr);

RewardBreakdown state_reward(const SystemState& state, const Scenario& s, double epsilon);

std::pair<SystemState, StepRecord> step(const SystemState& state, const Assignment& assignment,
                                        const Scenario& s, Rng& events);
std::pair<SystemState, StepRecord> step(const SystemState& state, const Assignment& assignment,
                                        const Scenario& s, const std::vector<Trajectory>& trajs,
                                        Rng& events);

struct EpisodeOptions {
  /// Validate the state and check data conservation after every step.
  bool check_invariants = false;
};

EpisodeLog run_episode(const Scenario& s, const Policy& policy, std::uint64_t seed,
                       const EpisodeOptions& options = {});

/// Re-simulates the recorded assignments from the same seed.
EpisodeLog replay_episode(const Scenario& s, const EpisodeLog& log);

Json to_json(const StepRecord& r);
Json to_json(const EpisodeLog& log);
/// Header line with episode metadata, then one JSON record per step.
std::string to_ndjson(const EpisodeLog& log);
/// One row per step: t, reward terms, mean energy, per-tower data.
std::string to_csv(const EpisodeLog& log);

}  // namespace uavsched
