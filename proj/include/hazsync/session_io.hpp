/**
 * @file session_io.hpp
 * @brief On-disk session directory format.
 *
 *     manifest.json            participant, protocol, trial windows and
 *                              layouts, reference marker log, device list
 *     <device>.jsonl           samples on the device clock (EEG, gaze)
 *     presses.jsonl            samples of the input device
 *     <device>.markers.jsonl   markers on the device clock
 *     ground_truth.json        planned detections and true clocks
 *
 * Stream records, one JSON object per line with sorted keys:
 *
 *     gaze   {"d":[x,y,z],"o":[x,y,z],"t":T}
 *     eeg    {"ch":[c0,...,c13],"t":T}
 *     marker {"seq":N,"t":T}
 *     press  {"t":T,"trial":K}
 *
 * Times are written in fixed notation with the shortest digits that read
 * back to the same double, padded to at least 9 significant digits.
 */
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hazsync/analytics.hpp"
#include "hazsync/simulator.hpp"

namespace hazsync::io {

namespace fs = std::filesystem;

inline constexpr std::string_view kManifestFile = "manifest.json";
inline constexpr std::string_view kGroundTruthFile = "ground_truth.json";
inline constexpr std::string_view kPressesFile = "presses.jsonl";
inline constexpr std::string_view kAlignedFile = "aligned.jsonl";
inline constexpr std::string_view kDiagnosticsFile = "sync_diagnostics.json";
inline constexpr std::string_view kDetectionsFile = "detections.json";
inline constexpr std::string_view kDwellsFile = "dwells.json";

std::string samples_file_name(const sim::DeviceInfo& device);
std::string markers_file_name(const sim::DeviceInfo& device);

/// Fixed notation, exact round trip, at least 9 significant digits.
std::string format_time(double seconds);

std::string gaze_line(const gaze::GazeSample& s);
std::string eeg_line(const sim::EegSample& s);
std::string marker_line(const timeline::Marker& m);
std::string press_line(const sim::PressSample& p);
/// Serialized form of sample i of a device's stream.
std::string sample_line(const sim::SampleStream& stream, std::size_t i);

nlohmann::json manifest_to_json(const sim::Manifest& m);
sim::Manifest manifest_from_json(const nlohmann::json& doc);

nlohmann::json ground_truth_to_json(const sim::GroundTruth& truth);
sim::GroundTruth ground_truth_from_json(const nlohmann::json& doc);

/// Creates the directory if needed. Throws IoError.
void write_session(const fs::path& dir, const sim::SessionRecording& rec);

struct LoadOptions {
  bool eeg = true;
  bool ground_truth = true;
};

/// Throws IoError on missing or malformed files.
sim::SessionRecording read_session(const fs::path& dir, const LoadOptions& options = {});

nlohmann::json diagnostics_to_json(const std::string& participant_id,
                                   const std::map<std::string, timeline::ClockModel>& models);
std::map<std::string, timeline::ClockModel> diagnostics_from_json(const nlohmann::json& doc);

/// Labeled-session document (detections.json).
nlohmann::json labels_to_json(const analytics::SessionMeta& meta, const labeling::Labels& labels,
                              const nlohmann::json& parameters);
analytics::SessionResult labels_from_json(const nlohmann::json& doc);

/// Loads detections.json and, when present, sync_diagnostics.json.
analytics::SessionResult read_labeled_session(const fs::path& dir);

nlohmann::json report_to_json(const analytics::DetectionReport& report);
std::string report_csv(const analytics::DetectionReport& report);
std::string participants_csv(const analytics::DetectionReport& report);
std::string categories_csv(const analytics::DetectionReport& report);

/// Shortest round-trip decimal, used for report values.
std::string format_number(double v);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, std::string_view text);
nlohmann::json read_json(const fs::path& path);
/// Two-space indented, sorted keys, trailing newline.
void write_json(const fs::path& path, const nlohmann::json& doc);

}  // namespace hazsync::io
