#include "hazsync/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "hazsync/error.hpp"

namespace hazsync::analytics {

HazardRatios detection_ratio(const std::map<int, std::uint64_t>& counts) {
  std::uint64_t total = 0;
  for (const auto& [id, c] : counts) {
    scene::hazard_info(id);  // validates the id
    total += c;
  }
  if (total == 0) {
    throw NoDetections("no detections to compute ratios from");
  }
  HazardRatios ratios;
  for (const auto& info : scene::hazard_catalog()) {
    auto it = counts.find(info.id);
    const std::uint64_t c = it == counts.end() ? 0 : it->second;
    ratios[info.id] = static_cast<double>(c) / static_cast<double>(total);
  }
  return ratios;
}

HazardRatios detection_ratio(std::span<const labeling::DetectionEvent> events) {
  std::map<int, std::uint64_t> counts;
  for (const auto& e : events) {
    ++counts[e.hazard_id];
  }
  return detection_ratio(counts);
}

CategoryRatios category_rollup(const HazardRatios& per_hazard_ratio) {
  CategoryRatios out;
  for (auto c : scene::kAllCategories) {
    out[c] = 0.0;
  }
  for (const auto& [id, ratio] : per_hazard_ratio) {
    out[scene::hazard_info(id).category] += ratio;
  }
  return out;
}

DetectionReport build_report(std::span<const SessionResult> sessions) {
  DetectionReport report;
  for (const auto& info : scene::hazard_catalog()) {
    report.per_hazard_counts[info.id] = 0;
  }
  for (const auto& s : sessions) {
    const std::string& pid = s.meta.participant_id;
    auto& mine = report.per_participant[pid];
    if (mine.empty()) {
      for (const auto& info : scene::hazard_catalog()) {
        mine[info.id] = 0;
      }
    }
    report.opportunities += static_cast<std::uint64_t>(std::max(0, s.meta.trial_count));
    for (const auto& d : s.detections) {
      scene::hazard_info(d.hazard_id);
      ++report.per_hazard_counts[d.hazard_id];
      ++mine[d.hazard_id];
      ++report.total_detections;
    }
    report.false_alarms_per_participant[pid] += s.false_alarms.size();
    report.total_false_alarms += s.false_alarms.size();
    for (const auto& [device, model] : s.clock_models) {
      report.sync_diagnostics[pid][device] = model;
    }
  }
  report.per_hazard_ratio = detection_ratio(report.per_hazard_counts);
  report.per_category_ratio = category_rollup(report.per_hazard_ratio);
  for (const auto& [id, c] : report.per_hazard_counts) {
    report.per_hazard_opportunity_rate[id] =
        report.opportunities == 0
            ? 0.0
            : static_cast<double>(c) / static_cast<double>(report.opportunities);
  }
  return report;
}

std::vector<std::uint64_t> apportion(std::span<const double> weights, std::uint64_t total) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (weights.empty() || !(sum > 0.0)) {
    throw std::invalid_argument("apportionment needs positive weights");
  }
  std::vector<std::uint64_t> counts(weights.size());
  std::vector<double> remainder(weights.size());
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double quota = weights[i] / sum * static_cast<double>(total);
    counts[i] = static_cast<std::uint64_t>(std::floor(quota));
    remainder[i] = quota - std::floor(quota);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) {
    ++counts[order[k % order.size()]];
  }
  return counts;
}

std::vector<SessionResult> published_ratio_fixture(std::uint64_t total, int participants,
                                                   int trials) {
  const auto counts = apportion(kPublishedRatiosPercent, total);
  const auto slots = static_cast<std::uint64_t>(participants) * static_cast<std::uint64_t>(trials);
  if (participants <= 0 || trials <= 0 || *std::max_element(counts.begin(), counts.end()) > slots) {
    throw std::invalid_argument("fixture needs participants x trials >= largest hazard count");
  }

  std::vector<SessionResult> sessions(static_cast<std::size_t>(participants));
  for (int p = 0; p < participants; ++p) {
    char id[16];
    std::snprintf(id, sizeof id, "F%03d", p + 1);
    sessions[static_cast<std::size_t>(p)].meta = {id, trials};
  }
  // Slot k of a hazard goes to participant k % P in trial k / P + 1.
  for (std::size_t h = 0; h < counts.size(); ++h) {
    const int hazard_id = static_cast<int>(h) + 1;
    for (std::uint64_t k = 0; k < counts[h]; ++k) {
      auto& s = sessions[k % static_cast<std::uint64_t>(participants)];
      const int trial = static_cast<int>(k / static_cast<std::uint64_t>(participants)) + 1;
      const double t_press = 1.0 + 2.0 * hazard_id;
      s.detections.push_back({s.meta.participant_id, trial, hazard_id, t_press, t_press - 0.5});
    }
  }
  for (auto& s : sessions) {
    std::sort(s.detections.begin(), s.detections.end(), [](const auto& a, const auto& b) {
      return std::tie(a.trial_id, a.t_press) < std::tie(b.trial_id, b.t_press);
    });
  }
  return sessions;
}

}  // namespace hazsync::analytics
