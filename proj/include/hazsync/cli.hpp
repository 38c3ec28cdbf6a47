#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace hazsync::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kInvalidConfig = 2,
  kIoFailure = 3,
  kSyncFailure = 4,
  kNoDetections = 5,
};

struct SimulateArgs {
  std::optional<std::filesystem::path> config;
  std::uint64_t seed = 42;
  std::filesystem::path out;
};

struct AlignArgs {
  std::filesystem::path session;
};

struct LabelArgs {
  std::filesystem::path session;
  std::optional<std::filesystem::path> config;
  std::optional<double> window;
  std::optional<double> cone;
};

struct ReportArgs {
  std::vector<std::filesystem::path> sessions;
  std::string format = "json";
  std::filesystem::path out = ".";
};

// Each command reports failures on err and returns the matching exit code.
int cmd_simulate(const SimulateArgs& args, std::ostream& err);
int cmd_align(const AlignArgs& args, std::ostream& err);
int cmd_label(const LabelArgs& args, std::ostream& err);
int cmd_report(const ReportArgs& args, std::ostream& err);

/// Full command-line entry point.
int run(int argc, char** argv);

}  // namespace hazsync::cli
