#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tubeuav/mission/config.hpp"
#include "tubeuav/sim/simloop.hpp"

namespace tubeuav::mission {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,
  kExitSynthesis = 3,
  kExitSimulation = 4,
};

struct CliOptions {
  std::string config;  // empty: defaults only
  std::string out;     // output directory
  std::optional<int> runs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> tube_mode;
  std::optional<int> hil_delay_ticks;
  std::vector<std::string> overrides;
};

/// File, then --override assignments, then the dedicated flags.
LoadedConfig load_cli_config(const CliOptions& options);

/// Gains, certificates and set sizes of both axes.
nlohmann::json synthesis_report(const sim::MissionSpec& spec, const sim::Controllers& controllers);

int cmd_validate(const CliOptions& options, std::ostream& out, std::ostream& err);
int cmd_synth(const CliOptions& options, std::ostream& out, std::ostream& err);
int cmd_fly(const CliOptions& options, std::ostream& out, std::ostream& err);

/// Full command-line entry: `tubeuav {validate|synth|fly} [flags]`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tubeuav::mission
