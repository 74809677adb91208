#pragma once

#include <string>
#include <vector>

namespace uavsched {

/// Rotary-wing airframe constants used by the hover and cruise power models.
struct Airframe {
  double delta = 0.012;  ///< profile drag coefficient
  double rho = 1.225;    ///< air density, kg/m^3
  double s = 0.05;       ///< rotor solidity
  double A = 0.503;      ///< rotor disc area, m^2
  double Omega = 300.0;  ///< blade angular velocity, rad/s
  double R = 0.4;        ///< rotor radius, m
  double k = 0.1;        ///< incremental correction to induced power
  double W = 20.0;       ///< aircraft weight, N
  double U_tip = 120.0;  ///< rotor tip speed, m/s
  double v0 = 4.03;      ///< mean rotor-induced velocity in hover, m/s
  double d0 = 0.6;       ///< fuselage drag ratio

  /// DJI Phantom 4 Pro v2.0 constants. W is 20 N rather than 1.375 kg * g so
  /// that W, A, rho and v0 = 4.03 m/s stay mutually consistent.
  static Airframe phantom4pro() { return {}; }

  friend bool operator==(const Airframe&, const Airframe&) = default;
};

/// Returns the names of non-positive fields; empty when the airframe is valid.
std::vector<std::string> airframe_errors(const Airframe& a);

/// True when U_tip agrees with Omega * R to within 1%.
bool tip_speed_consistent(const Airframe& a);

}  // namespace uavsched
