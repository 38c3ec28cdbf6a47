#include "hazsync/scene.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "hazsync/error.hpp"

namespace hazsync::scene {

namespace {

constexpr std::array<HazardInfo, kHazardCount> kCatalog = {{
    {1, HazardCategory::Fall, "unprotected object near the edge"},
    {2, HazardCategory::Electrical, "unprotected electric cables without proper conduit"},
    {3, HazardCategory::Trip, "unprotected ladder"},
    {4, HazardCategory::Fall, "unprotected barrel near the edge"},
    {5, HazardCategory::Chemical,
     "an unmarked bucket with unknown chemical fluid without lid"},
    {6, HazardCategory::Trip, "unprotected bricks on the ground"},
    {7, HazardCategory::Electrical, "unprotected junction box without proper protection"},
    {8, HazardCategory::Chemical, "unprotected igneous chemical fluids"},
    {9, HazardCategory::Chemical,
     "an unmarked bucket with unknown chemical fluid without lid"},
    {10, HazardCategory::Pressure, "gas cylinder without proper restraints in the work zone"},
}};

}  // namespace

std::string_view to_string(HazardCategory category) {
  switch (category) {
    case HazardCategory::Fall:
      return "Fall";
    case HazardCategory::Electrical:
      return "Electrical";
    case HazardCategory::Trip:
      return "Trip";
    case HazardCategory::Chemical:
      return "Chemical";
    case HazardCategory::Pressure:
      return "Pressure";
  }
  return "Unknown";
}

std::optional<HazardCategory> category_from_string(std::string_view name) {
  for (auto c : kAllCategories) {
    if (to_string(c) == name) {
      return c;
    }
  }
  return std::nullopt;
}

const std::array<HazardInfo, kHazardCount>& hazard_catalog() { return kCatalog; }

const HazardInfo& hazard_info(int id) {
  if (id < 1 || id > kHazardCount) {
    throw std::out_of_range("hazard id " + std::to_string(id) + " outside 1..10");
  }
  return kCatalog[static_cast<std::size_t>(id - 1)];
}

const HazardAoi& TrialLayout::hazard(int id) const {
  auto it = std::find_if(placements.begin(), placements.end(),
                         [id](const HazardAoi& h) { return h.id == id; });
  if (it == placements.end()) {
    throw std::out_of_range("hazard " + std::to_string(id) + " not placed in trial " +
                            std::to_string(trial_id));
  }
  return *it;
}

TrialLayout generate_trial_layout(int trial_id, std::uint64_t layout_seed,
                                  const PlacementOptions& options) {
  if (!(options.aoi_radius > 0.0)) {
    throw std::invalid_argument("AOI radius must be positive");
  }
  const double r = options.aoi_radius;
  const double separation = std::max(options.min_separation, 2.0 * r);
  const Box& b = options.site_bounds;
  const Box inner{{b.min.x + r, b.min.y + r, b.min.z + r}, {b.max.x - r, b.max.y - r, b.max.z - r}};
  const auto fail = [&] {
    return PlacementInfeasible("cannot place " + std::to_string(kHazardCount) +
                               " hazards with separation " + std::to_string(separation) +
                               " m in trial " + std::to_string(trial_id));
  };
  if (inner.min.x > inner.max.x || inner.min.y > inner.max.y || inner.min.z > inner.max.z) {
    throw fail();
  }

  std::seed_seq seq{static_cast<std::uint32_t>(layout_seed),
                    static_cast<std::uint32_t>(layout_seed >> 32),
                    static_cast<std::uint32_t>(trial_id)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> ux(inner.min.x, std::nextafter(inner.max.x, inner.max.x + 1));
  std::uniform_real_distribution<double> uy(inner.min.y, std::nextafter(inner.max.y, inner.max.y + 1));
  std::uniform_real_distribution<double> uz(inner.min.z, std::nextafter(inner.max.z, inner.max.z + 1));

  TrialLayout layout{trial_id, layout_seed, {}};
  layout.placements.reserve(kHazardCount);
  int attempts = 0;
  for (const auto& info : kCatalog) {
    while (true) {
      if (attempts++ >= kPlacementAttemptCap) {
        throw fail();
      }
      const Vec3 candidate{ux(rng), uy(rng), uz(rng)};
      const bool clear = std::all_of(
          layout.placements.begin(), layout.placements.end(),
          [&](const HazardAoi& h) { return norm(h.center - candidate) >= separation; });
      if (clear) {
        layout.placements.push_back(
            {info.id, info.category, std::string(info.description), candidate, r});
        break;
      }
    }
  }
  return layout;
}

}  // namespace hazsync::scene
