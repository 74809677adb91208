#include "uavsched/contents.hpp"

#include <numeric>

namespace uavsched {

namespace {

EventClass draw_class(Rng& rng) {
  std::uniform_int_distribution<int> pick(0, kEventClassCount - 1);
  return static_cast<EventClass>(pick(rng));
}

}  // namespace

std::vector<RegionState> initial_regions(const Scenario& s, Rng& rng) {
  std::vector<RegionState> regions(static_cast<std::size_t>(s.region_count()));
  for (int r = 0; r < s.region_count(); ++r) {
    const EventClass c = draw_class(rng);
    regions[r] = {r, c, s.content_sizes.of(c)};
  }
  return regions;
}

void sample_region_events(std::vector<RegionState>& regions, double resample_prob,
                          const ContentSizeMap& sizes, Rng& rng) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (auto& r : regions) {
    // one draw per region keeps the stream aligned regardless of outcomes
    const bool redraw = coin(rng) < resample_prob;
    const EventClass c = draw_class(rng);
    if (redraw) {
      r.event_class = c;
      r.content_size = sizes.of(c);
    }
  }
}

std::optional<Content> generate_content(Vec2 position, bool dwelled, bool scheduled,
                                        const std::vector<RegionState>& regions,
                                        const Scenario& s, int t) {
  if (scheduled || !dwelled) return std::nullopt;
  const int region = region_of(position, s);
  return Content{region, regions.at(region).content_size, t};
}

double transfer_contents(SystemState& state, int tower, int uav) {
  auto& store = state.uav_contents.at(uav);
  const double moved = std::accumulate(store.begin(), store.end(), 0.0,
                                       [](double acc, const Content& c) { return acc + c.size; });
  state.tower_data.at(tower) += moved;
  store.clear();
  return moved;
}

}  // namespace uavsched
