#pragma once

#include <optional>
#include <vector>

#include "uavsched/domain.hpp"

namespace uavsched {

/// Fresh regions with classes drawn uniformly.
std::vector<RegionState> initial_regions(const Scenario& s, Rng& rng);

/// Each region independently redraws its class (uniformly over the three)
/// with probability `resample_prob`.
void sample_region_events(std::vector<RegionState>& regions, double resample_prob,
                          const ContentSizeMap& sizes, Rng& rng);

/// One content for the region under the UAV, if it hovered this step and was
/// not sent to a tower.
std::optional<Content> generate_content(Vec2 position, bool dwelled, bool scheduled,
                                        const std::vector<RegionState>& regions,
                                        const Scenario& s, int t);

/// Moves every stored content of `uav` to `tower`. Returns the data moved.
double transfer_contents(SystemState& state, int tower, int uav);

}  // namespace uavsched
