#include "hazsync/labeling.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <tuple>

namespace hazsync::labeling {

Labels label_detections(std::span<const ButtonPress> presses,
                        std::span<const gaze::GazeHit> hits, double window) {
  if (!(window > 0.0)) {
    throw std::invalid_argument("labeling window must be positive");
  }

  // Only hits on a hazard can label a press.
  std::vector<const gaze::GazeHit*> on_hazard;
  on_hazard.reserve(hits.size());
  for (const auto& h : hits) {
    if (h.hazard_id) {
      on_hazard.push_back(&h);
    }
  }

  std::vector<const ButtonPress*> ordered;
  ordered.reserve(presses.size());
  for (const auto& p : presses) {
    ordered.push_back(&p);
  }
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
    return std::tie(a->participant_id, a->trial_id, a->t) <
           std::tie(b->participant_id, b->trial_id, b->t);
  });

  Labels out;
  std::set<std::tuple<std::string, int, int>> seen;
  for (const auto* p : ordered) {
    auto after = std::upper_bound(on_hazard.begin(), on_hazard.end(), p->t,
                                  [](double t, const gaze::GazeHit* h) { return t < h->t; });
    if (after != on_hazard.begin()) {
      const gaze::GazeHit& latest = **std::prev(after);
      if (p->t - latest.t <= window) {
        if (seen.emplace(p->participant_id, p->trial_id, *latest.hazard_id).second) {
          out.detections.push_back(
              {p->participant_id, p->trial_id, *latest.hazard_id, p->t, latest.t});
        }
        continue;
      }
    }
    out.false_alarms.push_back({p->participant_id, p->trial_id, p->t});
  }
  return out;
}

}  // namespace hazsync::labeling
