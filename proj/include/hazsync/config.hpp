#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "hazsync/simulator.hpp"

namespace hazsync {

struct LabelParams {
  double window = labeling::kDefaultWindow;
  double cone_deg = gaze::kDefaultConeHalfAngleDeg;
  double gap_tolerance = gaze::kDefaultGapTolerance;
};

/// Every tunable of the pipeline in one place. Any key left out of a config
/// file keeps its default; unknown keys are rejected.
struct Config {
  sim::PlanConfig plan;
  std::vector<sim::DeviceProfile> devices;
  sim::SimulationOptions simulation;
  LabelParams labeling;
};

/// EEG at 128 Hz, gaze at 120 Hz and a button device, each on its own
/// drifting clock with sub-millisecond marker jitter.
Config default_config();

/// Throws ConfigError naming the offending key.
Config config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const Config& config);

/// Throws ConfigError when the file is missing or malformed.
Config load_config(const std::filesystem::path& path);

/// Throws ConfigError when a labeling parameter is out of range.
void validate(const LabelParams& params);

}  // namespace hazsync
