#pragma once

#include <span>
#include <string>
#include <vector>

#include "hazsync/gaze.hpp"

namespace hazsync::labeling {

inline constexpr double kDefaultWindow = 1.0;

struct ButtonPress {
  double t = 0.0;  // reference clock
  int trial_id = 0;
  std::string participant_id;

  friend bool operator==(const ButtonPress&, const ButtonPress&) = default;
};

struct DetectionEvent {
  std::string participant_id;
  int trial_id = 0;
  int hazard_id = 0;
  double t_press = 0.0;
  double t_gaze = 0.0;

  friend bool operator==(const DetectionEvent&, const DetectionEvent&) = default;
};

struct FalseAlarm {
  std::string participant_id;
  int trial_id = 0;
  double t_press = 0.0;

  friend bool operator==(const FalseAlarm&, const FalseAlarm&) = default;
};

struct Labels {
  std::vector<DetectionEvent> detections;
  std::vector<FalseAlarm> false_alarms;
};

/// Attributes each press to the hazard of the latest gaze hit in
/// [t_press - window, t_press]. Presses with no such hit become false alarms.
/// Repeated detections of one (participant, trial, hazard) keep the earliest
/// press. Both output lists are ordered by (participant, trial, t_press).
Labels label_detections(std::span<const ButtonPress> presses,
                        std::span<const gaze::GazeHit> hits, double window = kDefaultWindow);

}  // namespace hazsync::labeling
