#include "uavsched/energy.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

namespace uavsched {

double blade_profile_power(const Airframe& a) {
  return a.delta / 8.0 * a.rho * a.s * a.A * std::pow(a.Omega, 3) * std::pow(a.R, 3);
}

double induced_power(const Airframe& a) {
  return (1.0 + a.k) * std::pow(a.W, 1.5) / std::sqrt(2.0 * a.rho * a.A);
}

double hover_power(const Airframe& a) { return blade_profile_power(a) + induced_power(a); }

CruiseTerms cruise_power_terms(const Airframe& a, double v) {
  if (!(v >= 0)) throw ValidationError("v", "cruise speed must be >= 0");
  const double v2 = v * v;
  const double v02 = a.v0 * a.v0;
  CruiseTerms t;
  t.blade_profile = blade_profile_power(a) * (1.0 + 3.0 * v2 / (a.U_tip * a.U_tip));
  double radicand = std::sqrt(1.0 + v2 * v2 / (4.0 * v02 * v02)) - v2 / (2.0 * v02);
  if (radicand < 0.0) {
    spdlog::warn("cruise_power: induced radicand {} clamped to 0 at v = {}", radicand, v);
    radicand = 0.0;
  }
  t.induced = induced_power(a) * std::sqrt(radicand);
  t.parasite = 0.5 * a.d0 * a.rho * a.s * a.A * v2 * v;
  return t;
}

double cruise_power(const Airframe& a, double v) { return cruise_power_terms(a, v).total(); }

double charge_amount(double offer_power, double eta_tower, double eta_uav, double step_len,
                     double travel_time) {
  return offer_power * eta_tower * eta_uav * std::max(0.0, step_len - travel_time);
}

double apply_charge(double energy, double charged, double capacity) {
  return std::min(energy + charged, capacity);
}

double step_consumption(const UavSpec& uav, const Trajectory& trajectory, double t0,
                        std::optional<double> scheduled_distance, double step_len) {
  const double hover = hover_power(uav.airframe);
  const double cruise = cruise_power(uav.airframe, uav.speed);
  if (scheduled_distance) {
    const double tau = travel_time(*scheduled_distance, uav.speed);
    if (2.0 * tau > step_len)
      throw InfeasiblePairError("round trip of " + std::to_string(2.0 * tau) +
                                " s does not fit in a " + std::to_string(step_len) + " s step");
    return cruise * (2.0 * tau) + hover * (step_len - 2.0 * tau);
  }
  const FlightSplit split = trajectory.split(t0, t0 + step_len);
  return cruise * split.flight + hover * split.dwell;
}

}  // namespace uavsched
