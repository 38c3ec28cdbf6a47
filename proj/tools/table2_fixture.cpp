// Writes labeled sessions whose pooled detections follow the published
// per-hazard ratios. `hazsync report` over the output reproduces them.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "hazsync/analytics.hpp"
#include "hazsync/error.hpp"
#include "hazsync/session_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate the published-ratio fixture sessions"};
  std::filesystem::path out;
  std::uint64_t total = hazsync::analytics::kDefaultFixtureTotal;
  int participants = 44;
  int trials = 10;
  app.add_option("--out", out, "Directory receiving one sub-directory per participant")
      ->required();
  app.add_option("--total", total, "Total detections")->capture_default_str();
  app.add_option("--participants", participants)->capture_default_str();
  app.add_option("--trials", trials)->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    const auto sessions =
        hazsync::analytics::published_ratio_fixture(total, participants, trials);
    const nlohmann::json parameters{{"fixture", true}};
    for (const auto& s : sessions) {
      const auto dir = out / s.meta.participant_id;
      std::filesystem::create_directories(dir);
      hazsync::io::write_json(dir / hazsync::io::kDetectionsFile,
                              hazsync::io::labels_to_json(s.meta, {s.detections, s.false_alarms},
                                                          parameters));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
