/**
 * @file analytics.hpp
 * @brief Detection shares per hazard and per category, and session reports.
 *
 * The headline figure is each hazard's share of all recognitions:
 * ratio_i = count_i / sum_j count_j. A per-opportunity rate
 * (count_i / (participants x trials)) is reported next to it.
 */
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hazsync/labeling.hpp"
#include "hazsync/scene.hpp"
#include "hazsync/timeline.hpp"

namespace hazsync::analytics {

using HazardRatios = std::map<int, double>;
using CategoryRatios = std::map<scene::HazardCategory, double>;

/// Share of all detections per hazard id, all ten ids present.
/// Throws NoDetections on empty input.
HazardRatios detection_ratio(std::span<const labeling::DetectionEvent> events);

/// Same, from raw per-hazard counts.
HazardRatios detection_ratio(const std::map<int, std::uint64_t>& counts);

/// Sums member-hazard ratios per category.
CategoryRatios category_rollup(const HazardRatios& per_hazard_ratio);

struct SessionMeta {
  std::string participant_id;
  int trial_count = 0;
};

/// Everything the report needs from one labeled session.
struct SessionResult {
  SessionMeta meta;
  std::vector<labeling::DetectionEvent> detections;
  std::vector<labeling::FalseAlarm> false_alarms;
  std::map<std::string, timeline::ClockModel> clock_models;  // by device id
};

struct DetectionReport {
  std::map<int, std::uint64_t> per_hazard_counts;
  HazardRatios per_hazard_ratio;
  std::map<int, double> per_hazard_opportunity_rate;
  CategoryRatios per_category_ratio;
  std::map<std::string, std::map<int, std::uint64_t>> per_participant;
  std::map<std::string, std::uint64_t> false_alarms_per_participant;
  std::uint64_t opportunities = 0;
  std::uint64_t total_detections = 0;
  std::uint64_t total_false_alarms = 0;
  // participant -> device -> fitted model
  std::map<std::string, std::map<std::string, timeline::ClockModel>> sync_diagnostics;
};

/// Aggregates one or more sessions. Sessions of the same participant are
/// merged. Throws NoDetections when no session has a detection.
DetectionReport build_report(std::span<const SessionResult> sessions);

/// Detection ratios printed for the ten hazards, in percent, ids 1..10.
inline constexpr std::array<double, scene::kHazardCount> kPublishedRatiosPercent = {
    20.65, 8.18, 5.77, 6.99, 5.58, 6.05, 9.97, 6.33, 11.63, 18.86};

/// Smallest total for which largest-remainder counts reproduce every
/// published ratio within 0.01 percentage points.
inline constexpr std::uint64_t kDefaultFixtureTotal = 2116;

/// Largest-remainder apportionment of total over weights. Ties on the
/// remainder go to the lower index.
std::vector<std::uint64_t> apportion(std::span<const double> weights, std::uint64_t total);

/// Synthetic labeled sessions whose pooled counts follow the published
/// ratios. Each hazard is detected at most once per (participant, trial), so
/// participants x trials must cover the largest count.
std::vector<SessionResult> published_ratio_fixture(std::uint64_t total = kDefaultFixtureTotal,
                                                   int participants = 44, int trials = 10);

}  // namespace hazsync::analytics
