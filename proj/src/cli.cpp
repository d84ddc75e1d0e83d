// SPDX-License-Identifier: Apache-2.0

#include "cfisac/cli.hpp"

#include "cfisac/config.hpp"
#include "cfisac/harness.hpp"
#include "cfisac/io.hpp"
#include "cfisac/sensing.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace cfisac {

std::string command_name(CommandKind kind) {
  switch (kind) {
    case CommandKind::Run: return "run";
    case CommandKind::PresetModes: return "preset-modes";
    case CommandKind::PresetRxSweep: return "preset-rx-sweep";
    case CommandKind::PresetBeamformers: return "preset-beamformers";
    case CommandKind::CalibratePfa: return "calibrate-pfa";
    case CommandKind::ValidateConfig: return "validate-config";
  }
  return "?";
}

std::string default_output_dir(CommandKind kind) {
  const char* root = std::getenv("CFISAC_OUT_ROOT");
  const std::filesystem::path base = (root != nullptr && *root != '\0') ? root : "results";
  return (base / command_name(kind)).string();
}

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::vector<std::string> settings;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::vector<int> rx;
  std::vector<int> kzf;
  std::optional<int> drops;
  std::optional<int> fading;
  std::optional<double> pfa;
  std::optional<int> threads;
  int rank = 12;
  long trials = 100000;
};

void add_common(CLI::App* sub, Flags& f, bool lists) {
  sub->add_option("--config", f.config, "Config file (key=value lines)");
  sub->add_option("--out", f.out, "Output directory");
  sub->add_option("--set", f.settings, "Override any config field, key=value (repeatable)");
  sub->add_option("--seed", f.seed, "Master seed");
  sub->add_option("--mode", f.mode, "UTC, UC, TC or CF");
  sub->add_option("--drops", f.drops, "Number of drops");
  sub->add_option("--fading", f.fading, "Fading realizations per drop");
  sub->add_option("--pfa", f.pfa, "Target false-alarm probability");
  sub->add_option("--threads", f.threads, "Worker threads (0 = all cores)");
  auto* rx = sub->add_option("--rx", f.rx, lists ? "Receive-AP counts, comma separated" : "Receive APs per region");
  auto* kzf = sub->add_option("--kzf", f.kzf, lists ? "ZF nulling orders, comma separated" : "ZF nulling order");
  if (lists) {
    rx->delimiter(',');
    kzf->delimiter(',');
  } else {
    rx->expected(1);
    kzf->expected(1);
  }
}

}  // namespace

Command parse_args(int argc, const char* const* argv) {
  CLI::App app{"Cell-free ISAC Monte Carlo simulator"};
  app.require_subcommand(1, 1);
  Flags f;

  struct Entry {
    CommandKind kind;
    const char* help;
    CLI::App* sub = nullptr;
  };
  std::vector<Entry> entries{
      {CommandKind::Run, "Run one experiment from a config file"},
      {CommandKind::PresetModes, "Compare UTC, UC, TC and CF"},
      {CommandKind::PresetRxSweep, "Sweep the receive-AP count at fixed cluster size"},
      {CommandKind::PresetBeamformers, "Compare MF and ZF sensing beams"},
      {CommandKind::CalibratePfa, "Print analytic and Monte Carlo detection thresholds"},
      {CommandKind::ValidateConfig, "Validate and print the resolved config"},
  };
  for (auto& e : entries) {
    e.sub = app.add_subcommand(command_name(e.kind), e.help);
    const bool lists = e.kind == CommandKind::PresetRxSweep || e.kind == CommandKind::PresetBeamformers;
    add_common(e.sub, f, lists);
    if (e.kind == CommandKind::CalibratePfa) {
      e.sub->add_option("--rank", f.rank, "Total dictionary rank r")->check(CLI::PositiveNumber);
      e.sub->add_option("--trials", f.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    throw CliExit(code == 0 ? 0 : 2, e.what());
  }

  Command cmd;
  for (const auto& e : entries)
    if (e.sub->parsed()) cmd.kind = e.kind;

  if (!f.config.empty()) cmd.config_path = f.config;
  if (!f.out.empty()) cmd.out_dir = f.out;
  if (cmd.kind == CommandKind::Run && !cmd.config_path) {
    std::cerr << "run: --config is required\n";
    throw CliExit(2, "run: --config is required");
  }

  for (const auto& s : f.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::cerr << "--set expects key=value, got '" << s << "'\n";
      throw CliExit(2, "malformed --set");
    }
    cmd.overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  if (f.seed) cmd.overrides.emplace_back("seed", std::to_string(*f.seed));
  if (f.mode) cmd.overrides.emplace_back("mode", *f.mode);
  if (f.drops) cmd.overrides.emplace_back("n_drops", std::to_string(*f.drops));
  if (f.fading) cmd.overrides.emplace_back("n_fading", std::to_string(*f.fading));
  if (f.pfa) cmd.overrides.emplace_back("pfa_target", format_double(*f.pfa));
  if (f.threads) cmd.overrides.emplace_back("threads", std::to_string(*f.threads));

  const bool lists = cmd.kind == CommandKind::PresetRxSweep || cmd.kind == CommandKind::PresetBeamformers;
  if (lists) {
    cmd.rx_counts = f.rx.empty() ? std::vector<int>{1, 2, 3, 4} : f.rx;
    cmd.k_zf_values = f.kzf.empty() ? std::vector<int>{1, 2} : f.kzf;
  } else {
    if (!f.rx.empty()) cmd.overrides.emplace_back("m_rx_per_region", std::to_string(f.rx.front()));
    if (!f.kzf.empty()) cmd.overrides.emplace_back("k_zf", std::to_string(f.kzf.front()));
  }
  cmd.rank = f.rank;
  cmd.trials = f.trials;
  return cmd;
}

namespace {

ExperimentConfig resolve_config(const Command& cmd) {
  ExperimentConfig config = cmd.config_path ? load_config(*cmd.config_path) : ExperimentConfig{};
  for (const auto& [key, value] : cmd.overrides) apply_setting(config, key, value);
  validate(config);
  return config;
}

/// Fails early, before any simulation time is spent, when the directory is unusable.
std::filesystem::path prepare_output(const Command& cmd) {
  const std::filesystem::path dir = cmd.out_dir ? *cmd.out_dir : default_output_dir(cmd.kind);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  const auto probe = dir / ".write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw std::runtime_error("output directory " + dir.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);
  return dir;
}

void report(const std::vector<ResultSet>& arms, const std::filesystem::path& dir) {
  write_result_directory(dir, arms);
  for (std::size_t i = 0; i < arms.size(); ++i) {
    if (i > 0) std::cout << '\n';
    write_summary(std::cout, arms[i]);
  }
  std::cout << "output: " << dir.string() << '\n';
}

}  // namespace

int execute(const Command& cmd) {
  try {
    const ExperimentConfig config = resolve_config(cmd);
    switch (cmd.kind) {
      case CommandKind::ValidateConfig:
        std::cout << to_text(config);
        return 0;
      case CommandKind::CalibratePfa: {
        const double noise = config.noise_power_w();
        RandomStream rng(config.seed, {tag(StreamTag::Calibration)});
        const double analytic = calibrate_threshold(cmd.rank, noise, config.pfa_target);
        const double empirical = calibrate_threshold_monte_carlo(cmd.rank, noise, config.pfa_target, cmd.trials, rng);
        std::cout << "rank: " << cmd.rank << '\n'
                  << "pfa_target: " << format_double(config.pfa_target) << '\n'
                  << "noise_power_w: " << format_double(noise) << '\n'
                  << "analytic_threshold: " << format_double(analytic) << '\n'
                  << "monte_carlo_threshold: " << format_double(empirical) << '\n'
                  << "relative_difference: " << format_double((empirical - analytic) / analytic) << '\n';
        return 0;
      }
      case CommandKind::Run: {
        const auto dir = prepare_output(cmd);
        report({run_experiment(config, "run")}, dir);
        return 0;
      }
      case CommandKind::PresetModes: {
        const auto dir = prepare_output(cmd);
        report(preset_mode_comparison(config), dir);
        return 0;
      }
      case CommandKind::PresetRxSweep: {
        const auto dir = prepare_output(cmd);
        report(preset_rx_sweep(config, cmd.rx_counts), dir);
        return 0;
      }
      case CommandKind::PresetBeamformers: {
        const auto dir = prepare_output(cmd);
        report(preset_beamformer_comparison(config, cmd.k_zf_values), dir);
        return 0;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

int run_cli(int argc, const char* const* argv) {
  try {
    return execute(parse_args(argc, argv));
  } catch (const CliExit& e) {
    return e.exit_code;
  }
}

}  // namespace cfisac
