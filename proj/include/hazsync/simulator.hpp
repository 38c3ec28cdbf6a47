/**
 * @file simulator.hpp
 * @brief Seeded generation of complete multi-device recording sessions.
 *
 * A session follows the trial protocol: a lead-in, then trials of fixed
 * length separated by rests. The stimulation source emits one marker per
 * trial start, trial end and button press; each device records every marker
 * on its own drifting clock, with optional jitter and dropout. Gaze follows
 * the planned looks at hazards and otherwise wanders along a scan path that
 * keeps clear of every AOI. EEG channels carry colored noise.
 */
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hazsync/gaze.hpp"
#include "hazsync/geometry.hpp"
#include "hazsync/labeling.hpp"
#include "hazsync/scene.hpp"
#include "hazsync/timeline.hpp"

namespace hazsync::sim {

enum class DeviceKind { Eeg, Gaze, Input };

std::string_view to_string(DeviceKind kind);
std::optional<DeviceKind> device_kind_from_string(std::string_view name);

inline constexpr int kEegChannels = 14;

struct DeviceProfile {
  std::string device_id;
  DeviceKind kind = DeviceKind::Eeg;
  double nominal_rate = 128.0;  // Hz
  // True device-to-reference map: t_ref = clock_scale * t_device + clock_offset.
  double clock_scale = 1.0;
  double clock_offset = 0.0;
  double marker_jitter_sigma = 0.0;  // seconds
  double marker_drop_prob = 0.0;
  int channel_count = 0;  // EEG only
};

struct PlannedBehavior {
  int hazard_id = 0;
  double gaze_onset = 0.0;  // seconds from trial start
  double gaze_duration = 0.0;
  std::optional<double> press_time;  // seconds from trial start
};

struct TrialPlan {
  scene::TrialLayout layout;
  std::vector<PlannedBehavior> behaviors;  // sorted by gaze_onset
};

struct SessionPlan {
  std::string participant_id = "P01";
  double participant_age = 25.1;
  Vec3 viewer{15.0, 15.0, 1.7};
  double trial_duration = 30.0;
  double rest_duration = 60.0;
  double lead_in = 5.0;
  std::vector<TrialPlan> trials;

  double trial_start(std::size_t index) const {
    return lead_in + static_cast<double>(index) * (trial_duration + rest_duration);
  }
  /// Reference time at which recording stops.
  double session_end() const;
};

enum class MarkerCause { TrialStart, TrialEnd, Press };

std::string_view to_string(MarkerCause cause);
std::optional<MarkerCause> marker_cause_from_string(std::string_view name);

struct ScheduledMarker {
  std::uint64_t seq = 0;
  double t_reference = 0.0;
  MarkerCause cause = MarkerCause::TrialStart;
  int trial_id = 0;

  friend bool operator==(const ScheduledMarker&, const ScheduledMarker&) = default;
};

/// Stimulation-side events in reference-time order, seqs dense from 0.
std::vector<ScheduledMarker> marker_schedule(const SessionPlan& plan);

/// Throws InvalidPlan describing the first violated constraint.
void validate_plan(const SessionPlan& plan);

struct SimulationOptions {
  double gaze_noise_sigma_deg = 0.5;
  double gaze_noise_clip_sigmas = 3.0;
  // Hit cone the session is designed against; planned looks are unambiguous
  // and the idle scan path never enters it.
  double aim_cone_deg = gaze::kDefaultConeHalfAngleDeg;
  double clearance_margin_deg = 0.5;
  double eeg_ar_coefficient = 0.97;
  double eeg_noise_uv = 5.0;

  double max_gaze_noise_deg() const { return gaze_noise_sigma_deg * gaze_noise_clip_sigmas; }
  /// Minimum angle between a looked-at hazard and any other hazard, and
  /// between the scan path and every hazard.
  double clearance_deg() const {
    return aim_cone_deg + max_gaze_noise_deg() + clearance_margin_deg;
  }
};

struct EegSample {
  double t = 0.0;
  std::vector<double> channels;

  friend bool operator==(const EegSample&, const EegSample&) = default;
};

struct PressSample {
  double t = 0.0;
  int trial_id = 0;

  friend bool operator==(const PressSample&, const PressSample&) = default;
};

using SampleStream =
    std::variant<std::vector<EegSample>, std::vector<gaze::GazeSample>, std::vector<PressSample>>;

/// What a device declares about itself. The true clock is not part of it.
struct DeviceInfo {
  std::string device_id;
  DeviceKind kind = DeviceKind::Eeg;
  double nominal_rate = 0.0;
  int channel_count = 0;

  friend bool operator==(const DeviceInfo&, const DeviceInfo&) = default;
};

struct DeviceRecording {
  DeviceInfo info;
  std::vector<timeline::Marker> markers;  // device clock
  SampleStream samples;                   // device clock

  friend bool operator==(const DeviceRecording&, const DeviceRecording&) = default;
};

struct TrialWindow {
  int trial_id = 0;
  double t_start = 0.0;  // reference clock
  double t_end = 0.0;
  scene::TrialLayout layout;

  friend bool operator==(const TrialWindow&, const TrialWindow&) = default;
};

struct Manifest {
  std::string participant_id;
  double participant_age = 0.0;
  std::uint64_t seed = 0;
  Vec3 viewer;
  double trial_duration = 0.0;
  double rest_duration = 0.0;
  double lead_in = 0.0;
  std::vector<TrialWindow> trials;
  std::vector<ScheduledMarker> reference_markers;
  std::vector<DeviceInfo> devices;

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

struct GroundTruth {
  std::vector<labeling::DetectionEvent> detections;  // t_gaze = t_press
  std::map<std::string, timeline::ClockModel> clocks;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct SessionRecording {
  Manifest manifest;
  std::vector<DeviceRecording> devices;
  GroundTruth ground_truth;

  const DeviceRecording* find_device(std::string_view id) const;

  friend bool operator==(const SessionRecording&, const SessionRecording&) = default;
};

/// Deterministic in (plan, profiles, seed, options). Throws InvalidPlan.
SessionRecording simulate_session(const SessionPlan& plan, const std::vector<DeviceProfile>& profiles,
                                  std::uint64_t seed, const SimulationOptions& options = {});

/// Detections implied by the plan: one per planned press.
std::vector<labeling::DetectionEvent> planned_detections(const SessionPlan& plan);

struct BehaviorConfig {
  int min_looks = 3;
  int max_looks = 6;
  double detect_prob = 0.75;
  double gaze_duration_min = 0.4;
  double gaze_duration_max = 1.6;
  double gap_min = 0.3;
  double gap_max = 2.0;
  double min_press_delay = 0.2;  // after gaze onset
  double first_look_min = 0.5;
  double trial_tail = 0.5;  // looks end this long before the trial does
};

struct PlanConfig {
  std::string participant_id = "P01";
  double participant_age = 25.1;
  int trial_count = 10;
  double trial_duration = 30.0;
  double rest_duration = 60.0;
  double lead_in = 5.0;
  Vec3 viewer{15.0, 15.0, 1.7};
  scene::PlacementOptions placement;
  std::optional<std::uint64_t> layout_seed;  // defaults to the session seed
  BehaviorConfig behavior;
};

/// Hazards of a layout that can be looked at without any other hazard
/// falling within clearance_deg of the line of sight.
std::vector<int> unambiguous_hazards(const scene::TrialLayout& layout, Vec3 viewer,
                                     double clearance_deg);

/// Random but valid plan: fresh layouts per trial and a sequence of
/// non-overlapping looks, some of them ending in a press.
SessionPlan make_session_plan(const PlanConfig& config, std::uint64_t seed,
                              const SimulationOptions& options = {});

}  // namespace hazsync::sim
