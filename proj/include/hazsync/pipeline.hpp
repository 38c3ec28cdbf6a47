#pragma once

#include <map>
#include <string>
#include <vector>

#include "hazsync/analytics.hpp"
#include "hazsync/config.hpp"
#include "hazsync/gaze.hpp"
#include "hazsync/labeling.hpp"
#include "hazsync/simulator.hpp"
#include "hazsync/timeline.hpp"

namespace hazsync::pipeline {

using ClockModels = std::map<std::string, timeline::ClockModel>;

/// Fits every device against the reference marker log in the manifest.
/// Throws SyncError naming the device that could not be fitted.
ClockModels synchronize(const sim::SessionRecording& rec);

/// All samples of all devices on the reference timeline.
std::vector<timeline::AlignedRecord> align(const sim::SessionRecording& rec,
                                           const ClockModels& models);

struct TrialDwell {
  int trial_id = 0;
  gaze::Dwell dwell;
};

struct LabelOutcome {
  labeling::Labels labels;
  std::vector<TrialDwell> dwells;
  std::vector<gaze::GazeHit> hits;  // reference time, sorted
};

/// Maps gaze and presses to reference time, hit-tests each gaze sample
/// against the layout of the trial it falls in, and applies the lookback
/// rule. Samples outside every trial are misses.
LabelOutcome label(const sim::SessionRecording& rec, const ClockModels& models,
                   const LabelParams& params);

analytics::SessionResult session_result(const sim::Manifest& manifest, const ClockModels& models,
                                        const labeling::Labels& labels);

}  // namespace hazsync::pipeline
