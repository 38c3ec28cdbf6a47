#include "hazsync/gaze.hpp"

#include <stdexcept>

namespace hazsync::gaze {

GazeHit cast_gaze_sample(const GazeSample& sample, std::span<const scene::HazardAoi> hazards,
                         double cone_half_angle_deg) {
  if (!(cone_half_angle_deg > 0.0 && cone_half_angle_deg <= 10.0)) {
    throw std::invalid_argument("cone half-angle must be in (0, 10] degrees");
  }
  const double cone = deg_to_rad(cone_half_angle_deg);

  GazeHit hit{sample.t, std::nullopt, 0.0};
  for (const auto& h : hazards) {
    const Vec3 to_center = h.center - sample.origin;
    if (!(dot(sample.direction, to_center) > 0.0)) {
      continue;
    }
    if (angle_between(sample.direction, to_center) > cone) {
      continue;
    }
    const double distance = norm(to_center);
    if (!hit.hazard_id || distance < hit.distance ||
        (distance == hit.distance && h.id < *hit.hazard_id)) {
      hit.hazard_id = h.id;
      hit.distance = distance;
    }
  }
  return hit;
}

std::vector<Dwell> segment_dwells(std::span<const GazeHit> hits, double gap_tolerance) {
  std::vector<Dwell> dwells;
  bool open = false;
  for (const auto& h : hits) {
    if (!h.hazard_id) {
      open = false;
      continue;
    }
    if (open && dwells.back().hazard_id == *h.hazard_id &&
        h.t - dwells.back().end <= gap_tolerance) {
      dwells.back().end = h.t;
      ++dwells.back().sample_count;
    } else {
      dwells.push_back({*h.hazard_id, h.t, h.t, 1});
      open = true;
    }
  }
  return dwells;
}

}  // namespace hazsync::gaze
