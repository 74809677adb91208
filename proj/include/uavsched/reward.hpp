#pragma once

#include <span>

#include "uavsched/domain.hpp"

namespace uavsched {

struct RewardBreakdown {
  double r_tower_raw = 0.0;
  double r_uav_raw = 0.0;
  double r_tower_norm = 0.0;
  double r_uav_norm = 0.0;
  double combined = 0.0;

  /// epsilon-weighted sums of the raw and normalized terms.
  double combined_raw(double epsilon) const;
  double combined_normalized(double epsilon) const;

  friend bool operator==(const RewardBreakdown&, const RewardBreakdown&) = default;
};

inline constexpr double kDefaultSigmaFloor = 1e-6;

double population_stddev(std::span<const double> values);

/// Sum over towers divided by the population standard deviation, with the
/// deviation floored at `sigma_floor`.
double tower_data_reward(std::span<const double> data, double sigma_floor = kDefaultSigmaFloor);

/// Sum of per-UAV battery fractions.
double uav_power_reward(std::span<const double> energy, std::span<const double> capacity);

struct RewardInputs {
  std::span<const double> tower_data;
  std::span<const double> energy;
  std::span<const double> capacity;
};

RewardBreakdown combined_reward(double epsilon, const RewardInputs& in, RewardMode mode,
                                double d_capacity, double sigma_floor = kDefaultSigmaFloor);

/// Mean of the series; the finite-horizon stand-in for the limit objective.
double system_value_timeavg(std::span<const double> series);

}  // namespace uavsched
