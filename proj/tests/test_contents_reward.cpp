#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "support.hpp"
#include "uavsched/contents.hpp"
#include "uavsched/reward.hpp"

using namespace uavsched;
using doctest::Approx;

TEST_CASE("region events") {
  const Scenario s = default_scenario();
  Rng rng(5);
  auto regions = initial_regions(s, rng);
  REQUIRE(regions.size() == 100);
  for (const auto& r : regions) CHECK(r.content_size == s.content_sizes.of(r.event_class));

  auto same = regions;
  sample_region_events(same, 0.0, s.content_sizes, rng);
  CHECK(same == regions);

  auto a = regions, b = regions;
  Rng r1(9), r2(9);
  sample_region_events(a, 1.0, s.content_sizes, r1);
  sample_region_events(b, 1.0, s.content_sizes, r2);
  CHECK(a == b);
}

TEST_CASE("resampled classes are uniform") {
  const Scenario s = default_scenario();
  std::vector<RegionState> one(1);
  Rng rng(2024);
  int counts[3] = {0, 0, 0};
  const int n = 10000;
  for (int k = 0; k < n; ++k) {
    sample_region_events(one, 1.0, s.content_sizes, rng);
    ++counts[static_cast<int>(one[0].event_class)];
  }
  for (int c : counts) CHECK(static_cast<double>(c) / n == Approx(1.0 / 3).epsilon(0.06));
  for (int c : counts) CHECK(std::abs(static_cast<double>(c) / n - 1.0 / 3) <= 0.02);
}

TEST_CASE("content generation") {
  const Scenario s = default_scenario();
  std::vector<RegionState> regions(100);
  for (int r = 0; r < 100; ++r) regions[r] = {r, EventClass::kFire, 4.0};
  const auto c = generate_content({130, 10}, true, false, regions, s, 7);
  REQUIRE(c.has_value());
  CHECK(c->size == 4.0);
  CHECK(c->source_region == 1);
  CHECK(c->created_at == 7);
  CHECK_FALSE(generate_content({130, 10}, true, true, regions, s, 7).has_value());
  CHECK_FALSE(generate_content({130, 10}, false, false, regions, s, 7).has_value());
}

TEST_CASE("transfer") {
  const Scenario s = testing::toy_scenario({{0, 0}}, {{0, 0}, {10, 0}});
  SystemState st = testing::fresh_state(s);
  st.tower_data[0] = 5;
  testing::give(st, 0, {2, 3});
  CHECK(transfer_contents(st, 0, 0) == 5.0);
  CHECK(st.tower_data[0] == 10.0);
  CHECK(st.uav_contents[0].empty());
  CHECK(transfer_contents(st, 0, 0) == 0.0);
  CHECK(st.tower_data[0] == 10.0);

  SystemState two = testing::fresh_state(s);
  testing::give(two, 0, {1});
  testing::give(two, 1, {4});
  transfer_contents(two, 0, 0);
  transfer_contents(two, 0, 1);
  CHECK(two.tower_data[0] == 5.0);
}

TEST_CASE("tower data reward") {
  const double d1[] = {1, 2, 3};
  CHECK(tower_data_reward(d1) == Approx(6.0 / std::sqrt(2.0 / 3.0)));
  CHECK(tower_data_reward(d1) == Approx(7.348).epsilon(1e-4));
  const double d2[] = {5, 5, 5};
  CHECK(tower_data_reward(d2) == Approx(15.0 / kDefaultSigmaFloor));
  const double d3[] = {0, 0};
  CHECK(tower_data_reward(d3) == 0.0);
}

TEST_CASE("raw tower reward is scale invariant") {
  Rng rng(17);
  std::uniform_real_distribution<double> u(0.0, 10.0), scale(0.01, 100.0);
  for (int k = 0; k < 500; ++k) {
    std::vector<double> d(5);
    for (auto& x : d) x = u(rng);
    const double c = scale(rng);
    std::vector<double> cd = d;
    for (auto& x : cd) x *= c;
    CHECK(tower_data_reward(cd) == Approx(tower_data_reward(d)).epsilon(1e-9));
  }
}

TEST_CASE("mean-preserving contraction never lowers the tower reward") {
  Rng rng(23);
  std::uniform_real_distribution<double> u(0.0, 10.0), frac(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    std::vector<double> d(5);
    for (auto& x : d) x = u(rng);
    const auto hi = std::max_element(d.begin(), d.end()) - d.begin();
    const auto lo = std::min_element(d.begin(), d.end()) - d.begin();
    if (d[hi] - d[lo] < 1e-6) continue;
    std::vector<double> c = d;
    const double move = frac(rng) * (d[hi] - d[lo]) / 2;  // never crosses
    c[hi] -= move;
    c[lo] += move;
    CHECK(tower_data_reward(c) >= tower_data_reward(d) * (1 - 1e-12));
  }
}

TEST_CASE("uav power reward") {
  const double full[] = {10, 20, 30}, cap3[] = {10, 20, 30};
  CHECK(uav_power_reward(full, cap3) == 3.0);
  const double e[] = {50, 100}, cap[] = {100, 100};
  CHECK(uav_power_reward(e, cap) == 1.5);
  const double empty[] = {0, 0};
  CHECK(uav_power_reward(empty, cap) == 0.0);
  const double lone[] = {1};
  CHECK_THROWS(uav_power_reward(lone, cap));

  Rng rng(4);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (int k = 0; k < 200; ++k) {
    double a[] = {u(rng), u(rng)};
    const double before = uav_power_reward(a, cap);
    a[k % 2] = std::min(100.0, a[k % 2] + u(rng) / 10);
    CHECK(uav_power_reward(a, cap) >= before);
  }
}

TEST_CASE("combined reward weights") {
  const double d[] = {1, 4, 2}, e[] = {30, 60}, cap[] = {100, 100};
  const double d_other[] = {7, 0, 2}, e_other[] = {90, 10};
  for (auto mode : {RewardMode::kRaw, RewardMode::kNormalized}) {
    const auto a0 = combined_reward(0.0, {d, e, cap}, mode, 20);
    const auto b0 = combined_reward(0.0, {d_other, e, cap}, mode, 20);
    CHECK(a0.combined == b0.combined);
    const auto a1 = combined_reward(1.0, {d, e, cap}, mode, 20);
    const auto b1 = combined_reward(1.0, {d, e_other, cap}, mode, 20);
    CHECK(a1.combined == b1.combined);
  }
  CHECK_THROWS_AS(combined_reward(1.5, {d, e, cap}, RewardMode::kRaw, 20), ValidationError);
}

TEST_CASE("normalized reward of a full, balanced, saturated state is 1") {
  const double d[] = {10, 10, 10, 10}, e[] = {5, 7}, cap[] = {5, 7};
  for (double eps : {0.0, 0.3, 0.5, 1.0})
    CHECK(combined_reward(eps, {d, e, cap}, RewardMode::kNormalized, 40).combined == Approx(1.0));
}

TEST_CASE("normalized reward stays in [0, 1]") {
  Rng rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    std::vector<double> d(5), e(4), cap(4, 100.0);
    for (auto& x : d) x = 10 * u(rng);
    for (auto& x : e) x = 100 * u(rng);
    const double eps = u(rng);
    const double r = combined_reward(eps, {d, e, cap}, RewardMode::kNormalized, 50).combined;
    CHECK(r >= 0.0);
    CHECK(r <= 1.0 + 1e-12);
  }
}

TEST_CASE("time average") {
  const double c[] = {0.4, 0.4, 0.4};
  CHECK(system_value_timeavg(c) == Approx(0.4));
  const double s[] = {0, 1};
  CHECK(system_value_timeavg(s) == 0.5);
  std::vector<double> v{0.1, 0.7, 0.3, 0.9};
  const double base = system_value_timeavg(v);
  std::sort(v.begin(), v.end());
  do CHECK(system_value_timeavg(v) == Approx(base).epsilon(1e-15));
  while (std::next_permutation(v.begin(), v.end()));
  CHECK_THROWS(system_value_timeavg(std::span<const double>{}));
}
