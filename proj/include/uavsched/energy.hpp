#pragma once

#include <optional>
#include <stdexcept>

#include "uavsched/airframe.hpp"
#include "uavsched/domain.hpp"
#include "uavsched/mobility.hpp"

namespace uavsched {

/// Blade-profile part of hover power, (delta/8) rho s A Omega^3 R^3.
double blade_profile_power(const Airframe& a);
/// Induced part of hover power, (1+k) W^{3/2} / sqrt(2 rho A).
double induced_power(const Airframe& a);
double hover_power(const Airframe& a);

struct CruiseTerms {
  double blade_profile = 0.0;
  double induced = 0.0;
  double parasite = 0.0;
  double total() const { return blade_profile + induced + parasite; }
};

CruiseTerms cruise_power_terms(const Airframe& a, double v);
double cruise_power(const Airframe& a, double v);

/// Energy received over the step after flying `travel_time` to the tower;
/// zero once the trip eats the whole step.
double charge_amount(double offer_power, double eta_tower, double eta_uav, double step_len,
                     double travel_time);

double apply_charge(double energy, double charged, double capacity);

class InfeasiblePairError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Joules spent by one UAV over the step starting at trajectory time `t0`.
/// Scheduled UAVs fly a round trip of `scheduled_distance` at cruise speed
/// and hover for the rest; unscheduled ones follow their trajectory.
double step_consumption(const UavSpec& uav, const Trajectory& trajectory, double t0,
                        std::optional<double> scheduled_distance, double step_len);

}  // namespace uavsched
