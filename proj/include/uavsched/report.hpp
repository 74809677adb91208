#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "uavsched/format.hpp"
#include "uavsched/scheduler.hpp"
#include "uavsched/sim.hpp"

namespace uavsched {

struct Quantiles {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  friend bool operator==(const Quantiles&, const Quantiles&) = default;
};

/// Linear-interpolation quantiles (the usual "type 7") of an unsorted sample.
Quantiles quantiles(std::vector<double> values);

/// Aggregate of one policy's episodes. Series are indexed by step; episodes
/// that ended early are padded with their final record.
struct SummaryStats {
  std::string policy;
  std::string scenario_digest;
  int episodes = 0;
  std::vector<double> mean_energy;               ///< J, over UAVs then seeds
  std::vector<std::vector<double>> tower_data;   ///< [step][tower], seed mean
  std::vector<Quantiles> tower_quantiles;        ///< over towers, then seed mean
  std::vector<double> reward_raw;
  std::vector<double> reward_normalized;
  double system_value = 0.0;  ///< mean of per-episode time averages
  friend bool operator==(const SummaryStats&, const SummaryStats&) = default;
};

SummaryStats summarize(std::span<const EpisodeLog> logs);

Json to_json(const SummaryStats& stats);
SummaryStats summary_from_json(const Json& j);
/// One row per step: mean energy, reward series, quantiles, tower data.
std::string to_csv(const SummaryStats& stats);

void write_file(const std::filesystem::path& path, const std::string& contents);
void export_summary(const SummaryStats& stats, const std::filesystem::path& path);
void export_log(const EpisodeLog& log, const std::filesystem::path& path);

/// One ordering claim checked seed by seed.
struct OrderingCheck {
  std::string name;
  int holds = 0;
  int total = 0;
  double threshold = 0.8;
  double fraction() const { return total > 0 ? static_cast<double>(holds) / total : 0.0; }
  bool pass() const { return total > 0 && fraction() >= threshold; }
};

struct PolicyRun {
  Policy policy;
  std::vector<EpisodeLog> logs;  ///< aligned with Comparison::seeds
  SummaryStats summary;
};

struct Comparison {
  std::vector<std::uint64_t> seeds;
  std::vector<PolicyRun> runs;
  std::vector<OrderingCheck> orderings;  ///< empty unless all four policies ran
  bool orderings_pass() const;
};

/// Runs policies x seeds (episodes in parallel), summarizes per policy and
/// evaluates the energy and fairness orderings when the four standard
/// policies are present.
Comparison compare(const Scenario& s, const std::vector<Policy>& policies,
                   const std::vector<std::uint64_t>& seeds, const EpisodeOptions& options = {},
                   unsigned threads = 0);

/// Final-step helpers used by the ordering checks.
double final_mean_energy(const EpisodeLog& log);
double final_tower_stddev(const EpisodeLog& log);
double final_total_data(const EpisodeLog& log);
double mean_energy_over_time(const EpisodeLog& log, int horizon);

std::vector<OrderingCheck> acceptance_orderings(const std::vector<PolicyRun>& runs);

Json to_json(const Comparison& c);
/// Human-readable table, one row per policy plus one line per ordering.
std::string comparison_table(const Comparison& c);

}  // namespace uavsched
