// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cfisac {

enum class CommandKind { Run, PresetModes, PresetRxSweep, PresetBeamformers, CalibratePfa, ValidateConfig };

struct Command {
  CommandKind kind = CommandKind::Run;
  std::optional<std::string> config_path;
  std::vector<std::pair<std::string, std::string>> overrides;  // config key, value; applied in order
  std::optional<std::string> out_dir;
  std::vector<int> rx_counts;    // preset-rx-sweep
  std::vector<int> k_zf_values;  // preset-beamformers
  int rank = 12;                 // calibrate-pfa
  long trials = 100000;          // calibrate-pfa
};

/// Thrown by parse_args. exit_code is 0 for --help and 2 for usage errors; the message has
/// already been printed.
struct CliExit : std::runtime_error {
  int exit_code;
  CliExit(int code, const std::string& what) : std::runtime_error(what), exit_code(code) {}
};

Command parse_args(int argc, const char* const* argv);

/// 0 on success, 1 on runtime failure (diagnostic on stderr).
int execute(const Command& command);

/// parse_args followed by execute, mapping CliExit to its exit code.
int run_cli(int argc, const char* const* argv);

/// Output directory used when --out is absent: $CFISAC_OUT_ROOT/<command> or results/<command>.
std::string default_output_dir(CommandKind kind);

std::string command_name(CommandKind kind);

}  // namespace cfisac
