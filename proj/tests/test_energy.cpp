#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "uavsched/energy.hpp"
#include "uavsched/mobility.hpp"

using namespace uavsched;
using doctest::Approx;

// Hand evaluation of the power equations with the Phantom 4 Pro constants,
// done once in double precision outside the library.
constexpr double kBladeProfile = 79.85628;
constexpr double kInduced = 88.627938;
constexpr double kHover = 168.484218;
constexpr double kCruise20 = 178.295821;

TEST_CASE("hover power terms") {
  const Airframe a = Airframe::phantom4pro();
  CHECK(blade_profile_power(a) == Approx(kBladeProfile).epsilon(1e-6));
  CHECK(induced_power(a) == Approx(kInduced).epsilon(1e-6));
  CHECK(hover_power(a) == Approx(kHover).epsilon(1e-6));
  CHECK(hover_power(a) == Approx(168.6).epsilon(0.01));
  CHECK(tip_speed_consistent(a));
}

TEST_CASE("hover power scales as the equation says") {
  Airframe a = Airframe::phantom4pro();
  Airframe twice = a;
  twice.delta *= 2;
  CHECK(blade_profile_power(twice) == Approx(2 * blade_profile_power(a)));
  CHECK(induced_power(twice) == induced_power(a));
  Airframe plain = a;
  plain.k = 0;
  CHECK(induced_power(plain) == Approx(std::pow(20.0, 1.5) / std::sqrt(2 * 1.225 * 0.503)));
}

TEST_CASE("cruise power") {
  const Airframe a = Airframe::phantom4pro();
  CHECK(cruise_power(a, 0.0) == hover_power(a));
  const CruiseTerms t = cruise_power_terms(a, 20.0);
  CHECK(t.blade_profile == Approx(86.51097).epsilon(1e-6));
  CHECK(t.induced == Approx(17.843851).epsilon(1e-6));
  CHECK(t.parasite == Approx(0.5 * 0.6 * 1.225 * 0.05 * 0.503 * 8000.0));
  CHECK(t.parasite == Approx(73.941).epsilon(1e-6));
  CHECK(cruise_power(a, 20.0) == Approx(kCruise20).epsilon(1e-6));
  CHECK(cruise_power(a, 20.0) == Approx(178.3).epsilon(0.02));
  CHECK(cruise_power(a, 1e-6) == Approx(hover_power(a)).epsilon(1e-9));
  for (double v = 10; v < 40; v += 1) CHECK(cruise_power(a, v + 1) > cruise_power(a, v));
  CHECK_THROWS_AS(cruise_power(a, -1), ValidationError);
}

TEST_CASE("charge amount and clamp") {
  CHECK(charge_amount(100, 0.9, 0.9, 60, 10) == Approx(4050.0));
  CHECK(charge_amount(100, 0.9, 0.9, 60, 60) == 0.0);
  CHECK(charge_amount(100, 0.9, 0.9, 60, 75) == 0.0);
  CHECK(charge_amount(100, 1, 1, 60, 0) == 6000.0);
  CHECK(apply_charge(100, 50, 120) == 120.0);
  CHECK(apply_charge(10, 5, 120) == 15.0);
  CHECK(apply_charge(120, 999, 120) == 120.0);
  CHECK(apply_charge(120, 0, 120) == 120.0);
}

TEST_CASE("charging matches a direct re-evaluation on random inputs") {
  Rng rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double p = 500 * u(rng), et = u(rng), eu = u(rng), step = 1 + 100 * u(rng),
                 travel = 120 * u(rng), cap = 1e5 * u(rng) + 1, e = cap * u(rng);
    const double expect = p * et * eu * (travel < step ? step - travel : 0.0);
    CHECK(charge_amount(p, et, eu, step, travel) == Approx(expect).epsilon(1e-12));
    CHECK(apply_charge(e, expect, cap) == (e + expect < cap ? e + expect : cap));
  }
}

TEST_CASE("battery capacity") {
  CHECK(UavSpec{}.battery_capacity == Approx(367700).epsilon(1e-3));
  CHECK(UavSpec{}.battery_capacity == Approx(367696.8).epsilon(1e-12));
}

TEST_CASE("step consumption") {
  const UavSpec uav = testing::parked_uav(1, {100, 100});
  const Trajectory parked(uav.waypoints, uav.speed);
  CHECK(step_consumption(uav, parked, 0, std::nullopt, 60) == Approx(kHover * 60).epsilon(1e-6));
  CHECK(step_consumption(uav, parked, 0, std::nullopt, 60) == Approx(10114).epsilon(0.01));
  CHECK(step_consumption(uav, parked, 0, 0.0, 60) == Approx(hover_power(uav.airframe) * 60));
  CHECK(step_consumption(uav, parked, 0, 200.0, 60) == Approx(kCruise20 * 20 + kHover * 40).epsilon(1e-6));
  CHECK(step_consumption(uav, parked, 0, 200.0, 60) == Approx(10308).epsilon(0.01));
  CHECK_THROWS_AS(step_consumption(uav, parked, 0, 700.0, 60), InfeasiblePairError);

  UavSpec flyer;
  flyer.waypoints = default_waypoints()[0];
  const Trajectory tr(flyer.waypoints, 20.0);
  CHECK(step_consumption(flyer, tr, 600, std::nullopt, 60) == Approx(kCruise20 * 25 + kHover * 35).epsilon(1e-6));
}
