#include "uavsched/reward.hpp"

#include <cmath>
#include <numeric>

namespace uavsched {

double RewardBreakdown::combined_raw(double epsilon) const {
  return epsilon * r_tower_raw + (1.0 - epsilon) * r_uav_raw;
}

double RewardBreakdown::combined_normalized(double epsilon) const {
  return epsilon * r_tower_norm + (1.0 - epsilon) * r_uav_norm;
}

double population_stddev(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / n);
}

double tower_data_reward(std::span<const double> data, double sigma_floor) {
  if (data.empty()) throw ValidationError("tower_data", "at least one tower required");
  const double sum = std::accumulate(data.begin(), data.end(), 0.0);
  double sigma = population_stddev(data);
  if (sigma < sigma_floor) sigma = sigma_floor;
  return sum / sigma;
}

double uav_power_reward(std::span<const double> energy, std::span<const double> capacity) {
  if (energy.size() != capacity.size())
    throw ValidationError("energy", "length " + std::to_string(energy.size()) +
                                        " does not match capacity length " +
                                        std::to_string(capacity.size()));
  double sum = 0.0;
  for (std::size_t j = 0; j < energy.size(); ++j) sum += energy[j] / capacity[j];
  return sum;
}

RewardBreakdown combined_reward(double epsilon, const RewardInputs& in, RewardMode mode,
                                double d_capacity, double sigma_floor) {
  if (!(epsilon >= 0 && epsilon <= 1)) throw ValidationError("epsilon", "must lie in [0, 1]");
  if (mode == RewardMode::kNormalized && !(d_capacity > 0))
    throw ValidationError("d_capacity", "must be > 0");
  RewardBreakdown b;
  b.r_tower_raw = tower_data_reward(in.tower_data, sigma_floor);
  b.r_uav_raw = uav_power_reward(in.energy, in.capacity);

  const double n = static_cast<double>(in.tower_data.size());
  const double sum = std::accumulate(in.tower_data.begin(), in.tower_data.end(), 0.0);
  const double mean = sum / n;
  const double cv = mean > 0.0 ? population_stddev(in.tower_data) / mean : 0.0;
  b.r_tower_norm = d_capacity > 0 ? (sum / d_capacity) / (1.0 + cv) : 0.0;
  b.r_uav_norm = in.energy.empty() ? 0.0 : b.r_uav_raw / static_cast<double>(in.energy.size());

  b.combined = mode == RewardMode::kRaw ? b.combined_raw(epsilon) : b.combined_normalized(epsilon);
  return b;
}

double system_value_timeavg(std::span<const double> series) {
  if (series.empty()) throw ValidationError("series", "time average of an empty series");
  return std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(series.size());
}

}  // namespace uavsched
