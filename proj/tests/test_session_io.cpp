#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hazsync/config.hpp"
#include "hazsync/error.hpp"
#include "hazsync/pipeline.hpp"
#include "hazsync/session_io.hpp"
#include "test_util.hpp"

using namespace hazsync;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int significant_digits(const std::string& s) {
  int n = 0;
  bool leading = true;
  for (char c : s) {
    if (c < '0' || c > '9') continue;
    if (leading && c == '0') continue;
    leading = false;
    ++n;
  }
  return n;
}

sim::SessionRecording small_session(std::uint64_t seed) {
  Config config = default_config();
  config.plan.rest_duration = 2.0;
  config.plan.trial_count = 3;
  config.devices[0].nominal_rate = 16.0;
  const auto plan = sim::make_session_plan(config.plan, seed, config.simulation);
  return sim::simulate_session(plan, config.devices, seed, config.simulation);
}

}  // namespace

TEST_SUITE("session_io") {
  TEST_CASE("time formatting keeps 9 significant digits and round-trips") {
    CHECK(io::format_time(5.0) == "5.00000000");
    CHECK(io::format_time(0.0) == "0.000000000");
    CHECK(io::format_time(102.55) == "102.550000");
    CHECK(io::format_time(0.001) == "0.00100000000");
    CHECK(io::format_time(-3.25) == "-3.25000000");
    CHECK(io::format_time(123456.789012345) == "123456.789012345");

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1000.0, 2000.0);
    for (int i = 0; i < 20000; ++i) {
      const double v = u(rng);
      const std::string s = io::format_time(v);
      CHECK(s.find_first_of("eE") == std::string::npos);
      CHECK(significant_digits(s) >= 9);
      CHECK(std::stod(s) == v);
    }
  }

  TEST_CASE("stream record layouts") {
    CHECK(io::marker_line({3, 12.5}) == R"({"seq":3,"t":12.5000000})");
    CHECK(io::press_line({7.25, 4}) == R"({"t":7.25000000,"trial":4})");
    CHECK(io::gaze_line({1.5, {15, 15, 1.7}, {0, 0, 1}}) ==
          R"({"d":[0,0,1],"o":[15,15,1.7],"t":1.50000000})");
    CHECK(io::eeg_line({2.0, {0.5, -1.25}}) == R"({"ch":[0.5,-1.25],"t":2.00000000})");
    // Every record is valid JSON.
    CHECK(json::parse(io::gaze_line({1.5, {15, 15, 1.7}, {0.6, 0.8, 0}}))["d"][1] == 0.8);
  }

  TEST_CASE("session directory round trip") {
    const auto rec = small_session(4);
    const auto dir = testing::scratch_dir("io_roundtrip");
    io::write_session(dir, rec);
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(fs::exists(dir / "presses.jsonl"));
    CHECK(fs::exists(dir / "gaze.jsonl"));
    CHECK(fs::exists(dir / "eeg.markers.jsonl"));

    const auto back = io::read_session(dir);
    CHECK(back == rec);

    const auto light = io::read_session(dir, {.eeg = false, .ground_truth = false});
    CHECK(std::get<std::vector<sim::EegSample>>(light.find_device("eeg")->samples).empty());
    CHECK(light.ground_truth.detections.empty());
    CHECK(light.manifest == rec.manifest);

    const auto manifest = io::read_json(dir / "manifest.json");
    CHECK(manifest["devices"][0]["samples_file"] == "eeg.jsonl");
    CHECK(manifest["devices"][0]["channel_count"] == 14);
    CHECK(manifest["reference_clock"] == "stimulation");
    CHECK(manifest["calibration"]["eye_tracker"] == "5-point");
    CHECK(manifest["participant"]["age"] == 25.1);
    fs::remove_all(dir);
  }

  TEST_CASE("malformed inputs raise IoError") {
    const auto rec = small_session(5);
    const auto dir = testing::scratch_dir("io_malformed");
    io::write_session(dir, rec);

    io::write_text(dir / "gaze.markers.jsonl", "{\"seq\":2,\"t\":5.0}\n{\"seq\":1,\"t\":6.0}\n");
    CHECK_THROWS_AS(io::read_session(dir), IoError);

    io::write_session(dir, rec);
    io::write_text(dir / "presses.jsonl", "{\"t\": oops}\n");
    CHECK_THROWS_AS(io::read_session(dir), IoError);

    io::write_session(dir, rec);
    fs::remove(dir / "gaze.jsonl");
    CHECK_THROWS_AS(io::read_session(dir), IoError);

    fs::remove(dir / "manifest.json");
    CHECK_THROWS_AS(io::read_session(dir), IoError);
    CHECK_THROWS_AS(io::read_labeled_session(dir), IoError);
    fs::remove_all(dir);
  }

  TEST_CASE("labels and diagnostics round trip") {
    const auto rec = small_session(6);
    const auto models = pipeline::synchronize(rec);
    const auto outcome = pipeline::label(rec, models, LabelParams{});
    const auto result = pipeline::session_result(rec.manifest, models, outcome.labels);
    const auto doc = io::labels_to_json(result.meta, outcome.labels, json{{"window", 1.0}});
    const auto back = io::labels_from_json(json::parse(doc.dump()));
    CHECK(back.meta.participant_id == "P01");
    CHECK(back.meta.trial_count == 3);
    CHECK(back.detections == outcome.labels.detections);
    CHECK(back.false_alarms == outcome.labels.false_alarms);
    CHECK(io::diagnostics_from_json(json::parse(io::diagnostics_to_json("P01", models).dump())) ==
          models);
  }

  TEST_CASE("report csv and json agree") {
    const auto sessions = analytics::published_ratio_fixture();
    const auto report = analytics::build_report(sessions);
    const auto doc = io::report_to_json(report);
    std::istringstream csv(io::report_csv(report));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "hazard_id,category,count,ratio,per_opportunity_rate");
    int rows = 0;
    while (std::getline(csv, line)) {
      std::istringstream fields(line);
      std::string id, cat, count, ratio, rate;
      std::getline(fields, id, ',');
      std::getline(fields, cat, ',');
      std::getline(fields, count, ',');
      std::getline(fields, ratio, ',');
      std::getline(fields, rate, ',');
      const auto& h = doc["hazards"][static_cast<std::size_t>(rows)];
      CHECK(h["id"] == std::stoi(id));
      CHECK(h["category"] == cat);
      CHECK(h["count"] == std::stoull(count));
      CHECK(h["ratio"].get<double>() == std::stod(ratio));
      CHECK(h["per_opportunity_rate"].get<double>() == std::stod(rate));
      ++rows;
    }
    CHECK(rows == 10);

    std::istringstream cats(io::categories_csv(report));
    std::getline(cats, line);
    CHECK(line == "category,ratio");
    while (std::getline(cats, line)) {
      const auto comma = line.find(',');
      CHECK(doc["categories"][line.substr(0, comma)].get<double>() ==
            std::stod(line.substr(comma + 1)));
    }
  }
}
