#include "hazsync/cli.hpp"

#include <algorithm>
#include <iostream>

#include <CLI11.hpp>

#include "hazsync/analytics.hpp"
#include "hazsync/config.hpp"
#include "hazsync/error.hpp"
#include "hazsync/pipeline.hpp"
#include "hazsync/session_io.hpp"
#include "hazsync/simulator.hpp"

namespace hazsync::cli {

namespace {

using nlohmann::json;

// Maps library errors onto exit codes.
template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    fn();
    return kOk;
  } catch (const ConfigError& e) {
    err << "error: invalid config: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const InvalidPlan& e) {
    err << "error: invalid config: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const PlacementInfeasible& e) {
    err << "error: invalid config: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const SyncError& e) {
    err << "error: synchronization failed for " << e.what() << '\n';
    return kSyncFailure;
  } catch (const NoDetections& e) {
    err << "error: " << e.what() << '\n';
    return kNoDetections;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  }
}

json dwells_to_json(const std::string& participant, const std::vector<pipeline::TrialDwell>& dwells) {
  json list = json::array();
  for (const auto& d : dwells) {
    list.push_back({{"trial", d.trial_id},
                    {"hazard", d.dwell.hazard_id},
                    {"start", d.dwell.start},
                    {"end", d.dwell.end},
                    {"samples", d.dwell.sample_count}});
  }
  return {{"participant", participant}, {"dwells", std::move(list)}};
}

}  // namespace

int cmd_simulate(const SimulateArgs& args, std::ostream& err) {
  return guarded(err, [&] {
    const Config config = args.config ? load_config(*args.config) : default_config();
    const auto plan = sim::make_session_plan(config.plan, args.seed, config.simulation);
    const auto rec = sim::simulate_session(plan, config.devices, args.seed, config.simulation);
    io::write_session(args.out, rec);
  });
}

int cmd_align(const AlignArgs& args, std::ostream& err) {
  return guarded(err, [&] {
    const auto rec = io::read_session(args.session, {.eeg = true, .ground_truth = false});
    const auto models = pipeline::synchronize(rec);
    const auto merged = pipeline::align(rec, models);

    std::string buf;
    buf.reserve(merged.size() * 96);
    for (const auto& r : merged) {
      const auto* dev = rec.find_device(r.device_id);
      buf += "{\"device\":";
      buf += json(r.device_id).dump();
      buf += ",\"idx\":";
      buf += std::to_string(r.source_index);
      buf += ",\"record\":";
      buf += io::sample_line(dev->samples, r.source_index);
      buf += ",\"t_ref\":";
      buf += io::format_time(r.t_reference);
      buf += "}\n";
    }
    io::write_text(args.session / io::kAlignedFile, buf);
    io::write_json(args.session / io::kDiagnosticsFile,
                   io::diagnostics_to_json(rec.manifest.participant_id, models));
  });
}

int cmd_label(const LabelArgs& args, std::ostream& err) {
  return guarded(err, [&] {
    LabelParams params = args.config ? load_config(*args.config).labeling : LabelParams{};
    if (args.window) params.window = *args.window;
    if (args.cone) params.cone_deg = *args.cone;
    validate(params);

    const auto rec = io::read_session(args.session, {.eeg = false, .ground_truth = false});
    const auto models = pipeline::synchronize(rec);
    const auto outcome = pipeline::label(rec, models, params);

    const json parameters{{"window", params.window},
                          {"cone_deg", params.cone_deg},
                          {"gap_tolerance", params.gap_tolerance}};
    const analytics::SessionMeta meta{rec.manifest.participant_id,
                                      static_cast<int>(rec.manifest.trials.size())};
    io::write_json(args.session / io::kDetectionsFile,
                   io::labels_to_json(meta, outcome.labels, parameters));
    io::write_json(args.session / io::kDwellsFile,
                   dwells_to_json(rec.manifest.participant_id, outcome.dwells));
    io::write_json(args.session / io::kDiagnosticsFile,
                   io::diagnostics_to_json(rec.manifest.participant_id, models));
  });
}

int cmd_report(const ReportArgs& args, std::ostream& err) {
  return guarded(err, [&] {
    if (args.format != "json" && args.format != "csv") {
      throw ConfigError("--format must be json or csv, got '" + args.format + "'");
    }
    std::vector<analytics::SessionResult> sessions;
    sessions.reserve(args.sessions.size());
    for (const auto& dir : args.sessions) sessions.push_back(io::read_labeled_session(dir));
    std::stable_sort(sessions.begin(), sessions.end(), [](const auto& a, const auto& b) {
      return a.meta.participant_id < b.meta.participant_id;
    });
    const auto report = analytics::build_report(sessions);

    std::error_code ec;
    std::filesystem::create_directories(args.out, ec);
    if (ec) throw IoError("cannot create " + args.out.string() + ": " + ec.message());
    if (args.format == "json") {
      io::write_json(args.out / "report.json", io::report_to_json(report));
    } else {
      io::write_text(args.out / "report.csv", io::report_csv(report));
      io::write_text(args.out / "participants.csv", io::participants_csv(report));
    }
    io::write_text(args.out / "categories.csv", io::categories_csv(report));
  });
}

int run(int argc, char** argv) {
  CLI::App app{"Multi-device session simulation, synchronization and hazard labeling"};
  app.require_subcommand(1);

  SimulateArgs sim_args;
  std::string sim_config;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic session directory");
  simulate->add_option("--config", sim_config, "JSON config file (defaults when omitted)");
  simulate->add_option("--seed", sim_args.seed, "Random seed")->capture_default_str();
  simulate->add_option("--out", sim_args.out, "Output session directory")->required();

  AlignArgs align_args;
  auto* align = app.add_subcommand("align", "Fit clocks and merge all streams onto reference time");
  align->add_option("session", align_args.session, "Session directory")->required();

  LabelArgs label_args;
  std::string label_config;
  double window = 0.0;
  double cone = 0.0;
  auto* label = app.add_subcommand("label", "Label button presses as hazard detections");
  label->add_option("session", label_args.session, "Session directory")->required();
  label->add_option("--config", label_config, "JSON config file for labeling defaults");
  auto* window_opt = label->add_option("--window", window, "Lookback window in seconds (1.0)");
  auto* cone_opt = label->add_option("--cone", cone, "Gaze cone half-angle in degrees (2.0)");

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Aggregate labeled sessions");
  report->add_option("sessions", report_args.sessions, "Labeled session directories")
      ->required();
  report->add_option("--format", report_args.format, "json or csv")->capture_default_str();
  report->add_option("--out", report_args.out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (simulate->parsed()) {
    if (!sim_config.empty()) sim_args.config = sim_config;
    return cmd_simulate(sim_args, std::cerr);
  }
  if (align->parsed()) return cmd_align(align_args, std::cerr);
  if (label->parsed()) {
    if (!label_config.empty()) label_args.config = label_config;
    if (window_opt->count()) label_args.window = window;
    if (cone_opt->count()) label_args.cone = cone;
    return cmd_label(label_args, std::cerr);
  }
  return cmd_report(report_args, std::cerr);
}

}  // namespace hazsync::cli
