#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hazsync/geometry.hpp"

namespace hazsync::scene {

enum class HazardCategory { Fall, Electrical, Trip, Chemical, Pressure };

inline constexpr std::array<HazardCategory, 5> kAllCategories = {
    HazardCategory::Fall, HazardCategory::Electrical, HazardCategory::Trip,
    HazardCategory::Chemical, HazardCategory::Pressure};

inline constexpr int kHazardCount = 10;

std::string_view to_string(HazardCategory category);
std::optional<HazardCategory> category_from_string(std::string_view name);

struct HazardInfo {
  int id = 0;
  HazardCategory category = HazardCategory::Fall;
  std::string_view description;
};

/// The ten hazards of the virtual site, ordered by id.
const std::array<HazardInfo, kHazardCount>& hazard_catalog();

/// Catalog entry for a hazard id in 1..10; throws std::out_of_range otherwise.
const HazardInfo& hazard_info(int id);

/// A placed hazard: a spherical area of interest.
struct HazardAoi {
  int id = 0;
  HazardCategory category = HazardCategory::Fall;
  std::string description;
  Vec3 center;
  double radius = 0.5;

  friend bool operator==(const HazardAoi&, const HazardAoi&) = default;
};

struct TrialLayout {
  int trial_id = 0;
  std::uint64_t layout_seed = 0;
  std::vector<HazardAoi> placements;  // sorted by id, one per hazard

  const HazardAoi& hazard(int id) const;

  friend bool operator==(const TrialLayout&, const TrialLayout&) = default;
};

struct PlacementOptions {
  Box site_bounds{{0.0, 0.0, 0.0}, {30.0, 30.0, 5.0}};
  double min_separation = 2.0;
  double aoi_radius = 0.5;
};

inline constexpr int kPlacementAttemptCap = 10'000;

/// Places all ten hazards by seeded rejection sampling inside the site box.
/// Deterministic in (trial_id, layout_seed, options). Throws
/// PlacementInfeasible once kPlacementAttemptCap candidates have been drawn.
TrialLayout generate_trial_layout(int trial_id, std::uint64_t layout_seed,
                                  const PlacementOptions& options = {});

}  // namespace hazsync::scene
