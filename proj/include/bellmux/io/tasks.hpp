#pragma once
#include <optional>
#include <string>

namespace bellmux {

struct SimulateOptions {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> shots;
  std::optional<int> threads;
  bool quiet = false;
};

/// Run a simulation to an event file plus metadata sidecar. Partial
/// outputs are removed on failure.
void cmd_simulate(const SimulateOptions& opt);

struct AnalyzeOptions {
  std::string events_path;
  std::string out_dir;
  std::string task;  // bell | visibility | lifetime | g2
  std::optional<std::string> config_path;  ///< overrides the metadata echo
  std::optional<std::uint64_t> seed;       ///< bootstrap seed override
  bool quiet = false;
};

void cmd_analyze(const AnalyzeOptions& opt);

struct ReportOptions {
  std::string out_dir;
  std::optional<std::string> config_path;
  bool quiet = false;
};

void cmd_report(const ReportOptions& opt);

}  // namespace bellmux
