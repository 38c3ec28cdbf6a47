/**
 * @file gaze.hpp
 * @brief Gaze-ray hit testing against hazard AOIs and dwell segmentation.
 *
 * A sample is "looking at" a hazard when the angle between the gaze direction
 * and the vector from the eye to the hazard center is within a cone, and the
 * center lies in front of the eye. When several hazards qualify, the nearest
 * center wins.
 */
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hazsync/geometry.hpp"
#include "hazsync/scene.hpp"

namespace hazsync::gaze {

inline constexpr double kDefaultConeHalfAngleDeg = 2.0;
inline constexpr double kDefaultGapTolerance = 0.1;

struct GazeSample {
  double t = 0.0;
  Vec3 origin;
  Vec3 direction;  // unit length

  friend bool operator==(const GazeSample&, const GazeSample&) = default;
};

struct GazeHit {
  double t = 0.0;
  std::optional<int> hazard_id;
  double distance = 0.0;

  friend bool operator==(const GazeHit&, const GazeHit&) = default;
};

struct Dwell {
  int hazard_id = 0;
  double start = 0.0;
  double end = 0.0;
  std::size_t sample_count = 0;

  friend bool operator==(const Dwell&, const Dwell&) = default;
};

/// Throws std::invalid_argument unless cone_half_angle_deg is in (0, 10].
GazeHit cast_gaze_sample(const GazeSample& sample, std::span<const scene::HazardAoi> hazards,
                         double cone_half_angle_deg = kDefaultConeHalfAngleDeg);

inline GazeHit cast_gaze_sample(const GazeSample& sample, const scene::TrialLayout& layout,
                                double cone_half_angle_deg = kDefaultConeHalfAngleDeg) {
  return cast_gaze_sample(sample, std::span<const scene::HazardAoi>(layout.placements),
                          cone_half_angle_deg);
}

/// Groups consecutive hits on one hazard into dwells. A change of hazard, a
/// miss, or an inter-sample gap above gap_tolerance closes the current dwell.
std::vector<Dwell> segment_dwells(std::span<const GazeHit> hits,
                                  double gap_tolerance = kDefaultGapTolerance);

}  // namespace hazsync::gaze
