#include <doctest.h>

#include <set>

#include "hazsync/config.hpp"
#include "hazsync/error.hpp"
#include "hazsync/pipeline.hpp"
#include "hazsync/simulator.hpp"

using namespace hazsync;
using namespace hazsync::sim;

namespace {

// Ten trials with no behavior; presses are added per test.
SessionPlan bare_plan(double lead_in = 5.0) {
  SessionPlan plan;
  plan.lead_in = lead_in;
  for (int t = 1; t <= 10; ++t) plan.trials.push_back({scene::generate_trial_layout(t, 8), {}});
  return plan;
}

std::vector<DeviceProfile> quiet_profiles(double scale = 1.0, double offset = 0.0) {
  return {{"eeg", DeviceKind::Eeg, 16.0, scale, offset, 0.0, 0.0, kEegChannels},
          {"gaze", DeviceKind::Gaze, 120.0, scale, -offset, 0.0, 0.0, 0},
          {"input", DeviceKind::Input, 1000.0, 1.0, 0.0, 0.0, 0.0, 0}};
}

PlanConfig short_protocol() {
  PlanConfig pc;
  pc.rest_duration = 5.0;
  return pc;
}

bool same_keys(const std::vector<labeling::DetectionEvent>& a,
               const std::vector<labeling::DetectionEvent>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].participant_id != b[i].participant_id || a[i].trial_id != b[i].trial_id ||
        a[i].hazard_id != b[i].hazard_id || std::abs(a[i].t_press - b[i].t_press) > tol) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_SUITE("simulator") {
  TEST_CASE("marker_schedule counts and ordering") {
    auto plan = bare_plan();
    auto schedule = marker_schedule(plan);
    CHECK(schedule.size() == 20);

    const int presses_in[7] = {1, 1, 2, 4, 6, 9, 10};
    double t = 3.0;
    for (int trial : presses_in) {
      plan.trials[static_cast<std::size_t>(trial - 1)].behaviors.push_back(
          {trial, t - 1.0, 2.0, t});
      t += 1.0;
    }
    schedule = marker_schedule(plan);
    CHECK(schedule.size() == 27);
    for (std::size_t i = 0; i < schedule.size(); ++i) {
      CHECK(schedule[i].seq == i);
      if (i) CHECK(schedule[i].t_reference > schedule[i - 1].t_reference);
    }
    CHECK(schedule.front().cause == MarkerCause::TrialStart);
    CHECK(schedule.back().cause == MarkerCause::TrialEnd);
    CHECK(std::count_if(schedule.begin(), schedule.end(),
                        [](const auto& m) { return m.cause == MarkerCause::Press; }) == 7);
  }

  TEST_CASE("invalid plans") {
    auto dup = bare_plan();
    dup.trials[2].behaviors = {{1, 1.0, 2.0, 2.5}, {2, 1.5, 2.0, 2.5}};
    CHECK_THROWS_AS(simulate_session(dup, quiet_profiles(), 1), InvalidPlan);

    auto at_end = bare_plan();
    at_end.trials[0].behaviors = {{1, 28.0, 2.0, 30.0}};
    CHECK_THROWS_AS(validate_plan(at_end), InvalidPlan);

    auto late = bare_plan();
    late.trials[0].behaviors = {{1, 29.0, 2.0, std::nullopt}};
    CHECK_THROWS_AS(validate_plan(late), InvalidPlan);

    auto bad_hazard = bare_plan();
    bad_hazard.trials[0].behaviors = {{11, 1.0, 2.0, std::nullopt}};
    CHECK_THROWS_AS(validate_plan(bad_hazard), InvalidPlan);

    CHECK_THROWS_AS(validate_plan(SessionPlan{}), InvalidPlan);

    auto profiles = quiet_profiles();
    profiles[1].clock_scale = 0.0;
    CHECK_THROWS_AS(simulate_session(bare_plan(), profiles, 1), InvalidPlan);
    profiles = quiet_profiles();
    profiles[1].device_id = "eeg";
    CHECK_THROWS_AS(simulate_session(bare_plan(), profiles, 1), InvalidPlan);
  }

  TEST_CASE("markers land on the device clock through the inverse map") {
    auto plan = bare_plan(100.0);
    std::vector<DeviceProfile> profiles{
        {"eeg", DeviceKind::Eeg, 8.0, 1.0005, 2.5, 0.0, 0.0, kEegChannels}};
    const auto rec = simulate_session(plan, profiles, 3);
    const auto& markers = rec.devices[0].markers;
    REQUIRE(markers.size() == 20);
    CHECK(rec.manifest.reference_markers[0].t_reference == 100.0);
    const timeline::ClockModel truth{1.0005, 2.5, 0.0, 2};
    CHECK(markers[0].t_device == timeline::to_device(truth, 100.0));
    CHECK(markers[0].t_device == doctest::Approx((100.0 - 2.5) / 1.0005).epsilon(1e-15));
  }

  TEST_CASE("zero drop probability records every marker on every device") {
    const auto plan = make_session_plan(short_protocol(), 5);
    const auto rec = simulate_session(plan, quiet_profiles(1.0003, 2.0), 5);
    for (const auto& dev : rec.devices) {
      REQUIRE(dev.markers.size() == rec.manifest.reference_markers.size());
      for (std::size_t i = 0; i < dev.markers.size(); ++i) CHECK(dev.markers[i].seq == i);
    }
  }

  TEST_CASE("dropout loses markers but keeps streams increasing") {
    const auto plan = make_session_plan(short_protocol(), 6);
    auto profiles = quiet_profiles(0.9995, 4.0);
    for (auto& p : profiles) {
      p.marker_drop_prob = 0.3;
      p.marker_jitter_sigma = 0.001;
    }
    const auto rec = simulate_session(plan, profiles, 6);
    std::size_t total = 0;
    for (const auto& dev : rec.devices) {
      total += dev.markers.size();
      for (std::size_t i = 1; i < dev.markers.size(); ++i) {
        CHECK(dev.markers[i].seq > dev.markers[i - 1].seq);
        CHECK(dev.markers[i].t_device > dev.markers[i - 1].t_device);
      }
      std::visit(
          [](const auto& samples) {
            for (std::size_t i = 1; i < samples.size(); ++i) CHECK(samples[i].t > samples[i - 1].t);
          },
          dev.samples);
    }
    CHECK(total < 3 * rec.manifest.reference_markers.size());
  }

  TEST_CASE("simulation is deterministic") {
    const auto config = default_config();
    const auto plan = make_session_plan(short_protocol(), 42, config.simulation);
    const auto a = simulate_session(plan, config.devices, 42, config.simulation);
    const auto b = simulate_session(plan, config.devices, 42, config.simulation);
    CHECK(a == b);
    const auto c = simulate_session(plan, config.devices, 43, config.simulation);
    CHECK_FALSE(a == c);
    CHECK(make_session_plan(short_protocol(), 42).trials.size() == 10);
  }

  TEST_CASE("EEG carries 14 channels at the nominal rate") {
    const auto plan = make_session_plan(short_protocol(), 1);
    std::vector<DeviceProfile> profiles{
        {"eeg", DeviceKind::Eeg, 128.0, 1.0, 0.0, 0.0, 0.0, kEegChannels}};
    const auto rec = simulate_session(plan, profiles, 1);
    const auto& eeg = std::get<std::vector<EegSample>>(rec.devices[0].samples);
    REQUIRE(eeg.size() > 2);
    CHECK(eeg[0].channels.size() == 14);
    CHECK(eeg[1].t - eeg[0].t == doctest::Approx(1.0 / 128.0));
    CHECK(eeg.back().t <= plan.session_end());
  }

  TEST_CASE("generated plans are valid and target unambiguous hazards") {
    const SimulationOptions opts;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto plan = make_session_plan(PlanConfig{}, seed, opts);
      CHECK_NOTHROW(validate_plan(plan));
      CHECK(plan.trials.size() == 10);
      for (const auto& trial : plan.trials) {
        const auto ok = unambiguous_hazards(trial.layout, plan.viewer, opts.clearance_deg());
        std::set<int> looked;
        for (std::size_t i = 0; i < trial.behaviors.size(); ++i) {
          const auto& b = trial.behaviors[i];
          CHECK(std::find(ok.begin(), ok.end(), b.hazard_id) != ok.end());
          CHECK(looked.insert(b.hazard_id).second);
          if (b.press_time) {
            CHECK(*b.press_time >= b.gaze_onset + PlanConfig{}.behavior.min_press_delay);
            CHECK(*b.press_time <= b.gaze_onset + b.gaze_duration);
          }
          if (i) {
            const auto& prev = trial.behaviors[i - 1];
            CHECK(b.gaze_onset > prev.gaze_onset + prev.gaze_duration);
          }
        }
      }
    }
  }

  TEST_CASE("planned looks hit the planned hazard, the scan path hits nothing") {
    const SimulationOptions opts;
    const auto plan = make_session_plan(short_protocol(), 12, opts);
    const auto rec = simulate_session(plan, quiet_profiles(), 12, opts);
    const auto& samples = std::get<std::vector<gaze::GazeSample>>(rec.find_device("gaze")->samples);
    std::size_t looking = 0;
    for (const auto& s : samples) {
      for (std::size_t k = 0; k < plan.trials.size(); ++k) {
        const double rel = s.t - plan.trial_start(k);
        if (rel < 0.0 || rel > plan.trial_duration) continue;
        std::optional<int> planned;
        for (const auto& b : plan.trials[k].behaviors) {
          if (rel >= b.gaze_onset && rel <= b.gaze_onset + b.gaze_duration) planned = b.hazard_id;
        }
        const auto hit = gaze::cast_gaze_sample(s, plan.trials[k].layout, opts.aim_cone_deg);
        CHECK(hit.hazard_id == planned);
        looking += planned.has_value();
      }
    }
    CHECK(looking > 100);
  }

  TEST_CASE("pipeline reproduces planned detections with and without drift") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      const auto plan = make_session_plan(short_protocol(), seed);
      for (bool drift : {false, true}) {
        const auto profiles = drift ? quiet_profiles(1.0008, 7.5) : quiet_profiles();
        const auto rec = simulate_session(plan, profiles, seed);
        const auto models = pipeline::synchronize(rec);
        const auto outcome = pipeline::label(rec, models, LabelParams{});
        CHECK(same_keys(outcome.labels.detections, rec.ground_truth.detections, 1e-9));
        CHECK(outcome.labels.false_alarms.empty());
        CHECK(!rec.ground_truth.detections.empty());
      }
    }
  }
}
