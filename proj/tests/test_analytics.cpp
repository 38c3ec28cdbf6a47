#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "hazsync/analytics.hpp"
#include "hazsync/error.hpp"

using namespace hazsync;
using namespace hazsync::analytics;
using scene::HazardCategory;

namespace {

std::vector<labeling::DetectionEvent> events_for(const std::map<int, int>& counts,
                                                 const std::string& pid = "P01") {
  std::vector<labeling::DetectionEvent> out;
  for (const auto& [id, n] : counts) {
    for (int k = 0; k < n; ++k) out.push_back({pid, k + 1, id, 1.0 * k, 1.0 * k});
  }
  return out;
}

double sum_of(const auto& m) {
  double s = 0.0;
  for (const auto& [k, v] : m) s += v;
  return s;
}

}  // namespace

TEST_SUITE("analytics") {
  TEST_CASE("detection_ratio examples") {
    std::map<int, int> uniform;
    for (int id = 1; id <= 10; ++id) uniform[id] = 5;
    auto r = detection_ratio(events_for(uniform));
    for (int id = 1; id <= 10; ++id) CHECK(r.at(id) == doctest::Approx(0.1).epsilon(1e-15));

    r = detection_ratio(events_for({{10, 1}}));
    REQUIRE(r.size() == 10);
    CHECK(r.at(10) == 1.0);
    for (int id = 1; id <= 9; ++id) CHECK(r.at(id) == 0.0);

    CHECK_THROWS_AS(detection_ratio(std::vector<labeling::DetectionEvent>{}), NoDetections);
    CHECK_THROWS_AS(detection_ratio(std::map<int, std::uint64_t>{{1, 0}}), NoDetections);
  }

  TEST_CASE("published ratios from apportioned counts") {
    const auto counts = apportion(kPublishedRatiosPercent, kDefaultFixtureTotal);
    CHECK(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}) == kDefaultFixtureTotal);
    std::map<int, std::uint64_t> by_id;
    for (std::size_t i = 0; i < counts.size(); ++i) by_id[static_cast<int>(i) + 1] = counts[i];
    const auto r = detection_ratio(by_id);
    for (int id = 1; id <= 10; ++id) {
      CHECK(std::abs(100.0 * r.at(id) - kPublishedRatiosPercent[id - 1]) <= 0.01);
    }
    // The old default of 1000 cannot hit every ratio within 0.01 pp.
    const auto coarse = apportion(kPublishedRatiosPercent, 1000);
    double worst = 0.0;
    for (std::size_t i = 0; i < coarse.size(); ++i) {
      worst = std::max(worst, std::abs(coarse[i] / 10.0 - kPublishedRatiosPercent[i]));
    }
    CHECK(worst > 0.01);
  }

  TEST_CASE("apportion") {
    const std::vector<double> w{1.0, 1.0, 1.0};
    CHECK(apportion(w, 10) == std::vector<std::uint64_t>{4, 3, 3});
    CHECK(apportion(std::vector<double>{0.5, 0.25, 0.25}, 8) ==
          std::vector<std::uint64_t>{4, 2, 2});
    CHECK_THROWS_AS(apportion(std::vector<double>{}, 3), std::invalid_argument);
  }

  TEST_CASE("category_rollup examples") {
    HazardRatios published;
    for (int id = 1; id <= 10; ++id) published[id] = kPublishedRatiosPercent[id - 1] / 100.0;
    // Hand-summed rows per category.
    const std::map<HazardCategory, double> expected{
        {HazardCategory::Fall, 20.65 + 6.99},
        {HazardCategory::Electrical, 8.18 + 9.97},
        {HazardCategory::Trip, 5.77 + 6.05},
        {HazardCategory::Chemical, 5.58 + 6.33 + 11.63},
        {HazardCategory::Pressure, 18.86},
    };
    CHECK(expected.at(HazardCategory::Fall) == doctest::Approx(27.64));
    CHECK(expected.at(HazardCategory::Electrical) == doctest::Approx(18.15));
    CHECK(expected.at(HazardCategory::Trip) == doctest::Approx(11.82));
    CHECK(expected.at(HazardCategory::Chemical) == doctest::Approx(23.54));
    const auto rolled = category_rollup(published);
    for (const auto& [c, pct] : expected) CHECK(100.0 * rolled.at(c) == doctest::Approx(pct));

    HazardRatios uniform;
    for (int id = 1; id <= 10; ++id) uniform[id] = 0.1;
    const auto u = category_rollup(uniform);
    CHECK(u.at(HazardCategory::Fall) == doctest::Approx(0.2));
    CHECK(u.at(HazardCategory::Electrical) == doctest::Approx(0.2));
    CHECK(u.at(HazardCategory::Trip) == doctest::Approx(0.2));
    CHECK(u.at(HazardCategory::Chemical) == doctest::Approx(0.3));
    CHECK(u.at(HazardCategory::Pressure) == doctest::Approx(0.1));

    HazardRatios trip_only;
    for (int id = 1; id <= 10; ++id) trip_only[id] = id == 3 ? 1.0 : 0.0;
    const auto t = category_rollup(trip_only);
    CHECK(t.at(HazardCategory::Trip) == 1.0);
    CHECK(sum_of(t) == 1.0);
  }

  TEST_CASE("ratio properties on random count vectors") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> count(0, 500), zero(0, 3), scale(2, 50);
    for (int iter = 0; iter < 1000; ++iter) {
      std::map<int, std::uint64_t> counts;
      std::uint64_t total = 0;
      for (int id = 1; id <= 10; ++id) {
        counts[id] = zero(rng) == 0 ? 0 : static_cast<std::uint64_t>(count(rng));
        total += counts[id];
      }
      if (total == 0) counts[1] = 1;
      const auto r = detection_ratio(counts);
      CHECK(std::abs(sum_of(r) - 1.0) <= 1e-9);
      CHECK(std::abs(sum_of(category_rollup(r)) - 1.0) <= 1e-9);

      const auto k = static_cast<std::uint64_t>(scale(rng));
      auto scaled = counts;
      for (auto& [id, c] : scaled) c *= k;
      const auto rs = detection_ratio(scaled);
      for (int id = 1; id <= 10; ++id) CHECK(std::abs(rs.at(id) - r.at(id)) <= 1e-15);
    }
  }

  TEST_CASE("build_report examples") {
    SessionResult one{{"P01", 10}, events_for({{7, 1}}), {}, {}};
    one.clock_models["eeg"] = {1.0002, 1.25, 1e-4, 20};
    auto report = build_report(std::vector<SessionResult>{one});
    CHECK(report.per_hazard_counts.at(7) == 1);
    CHECK(report.per_hazard_counts.at(1) == 0);
    CHECK(report.opportunities == 10);
    CHECK(report.per_hazard_ratio.at(7) == 1.0);
    CHECK(report.per_hazard_opportunity_rate.at(7) == doctest::Approx(0.1));
    CHECK(report.sync_diagnostics.at("P01").at("eeg").scale == 1.0002);

    const auto twice = build_report(std::vector<SessionResult>{one, one});
    for (int id = 1; id <= 10; ++id) {
      CHECK(twice.per_hazard_counts.at(id) == 2 * report.per_hazard_counts.at(id));
      CHECK(twice.per_hazard_ratio.at(id) == report.per_hazard_ratio.at(id));
    }
    CHECK(twice.opportunities == 20);

    SessionResult empty{{"P02", 10}, {}, {{"P02", 1, 3.0}}, {}};
    CHECK_THROWS_AS(build_report(std::vector<SessionResult>{empty}), NoDetections);
    CHECK_THROWS_AS(build_report(std::vector<SessionResult>{}), NoDetections);
  }

  TEST_CASE("per-participant counts sum to global counts") {
    const auto sessions = published_ratio_fixture();
    const auto report = build_report(sessions);
    CHECK(report.total_detections == kDefaultFixtureTotal);
    CHECK(report.opportunities == 440);
    for (int id = 1; id <= 10; ++id) {
      std::uint64_t s = 0;
      for (const auto& [pid, counts] : report.per_participant) s += counts.at(id);
      CHECK(s == report.per_hazard_counts.at(id));
      CHECK(std::abs(100.0 * report.per_hazard_ratio.at(id) - kPublishedRatiosPercent[id - 1]) <=
            0.01);
    }
    // At most one detection of a hazard per participant and trial.
    for (const auto& s : sessions) {
      std::set<std::pair<int, int>> keys;
      for (const auto& d : s.detections) CHECK(keys.emplace(d.trial_id, d.hazard_id).second);
    }
    CHECK_THROWS_AS(published_ratio_fixture(kDefaultFixtureTotal, 10, 10), std::invalid_argument);
  }
}
