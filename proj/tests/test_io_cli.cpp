// SPDX-License-Identifier: Apache-2.0

#include "cfisac/cli.hpp"
#include "cfisac/io.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace cfisac;
using cfisac::test::tiny_config;
namespace fs = std::filesystem;

namespace {

Command parse(std::vector<const char*> args) {
  args.insert(args.begin(), "cfisac");
  return parse_args(static_cast<int>(args.size()), args.data());
}

int parse_exit_code(std::vector<const char*> args) {
  try {
    parse(std::move(args));
  } catch (const CliExit& e) {
    return e.exit_code;
  }
  return -1;
}

std::string first_line(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  return line;
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("cfisac_test_" + name);
  fs::remove_all(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& body) {
  fs::create_directories(dir);
  const auto path = dir / "exp.cfg";
  std::ofstream(path) << body;
  return path;
}

int run_tool(const std::string& args) {
  const std::string cmd = std::string(CFISAC_TOOL_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("layout text round trip") {
  ExperimentConfig config;
  config.random_orientation = true;
  RandomStream rng(4);
  const auto layout = generate_layout(config, rng);
  std::stringstream buffer;
  write_layout(buffer, layout);
  const auto back = read_layout(buffer, config);
  CHECK(back.aps == layout.aps);
  CHECK(back.ues == layout.ues);
  CHECK(back.ap_broadside == layout.ap_broadside);
  REQUIRE(back.targets.size() == layout.targets.size());
  for (std::size_t i = 0; i < back.targets.size(); ++i) {
    CHECK(back.targets[i].position == layout.targets[i].position);
    CHECK(back.targets[i].region == layout.targets[i].region);
  }
  std::istringstream bad("ap 0 1 2\n");
  CHECK_THROWS_AS(read_layout(bad, config), std::invalid_argument);
  std::istringstream gap("ap 1 1 2 3 0\n");
  CHECK_THROWS_AS(read_layout(gap, config), std::invalid_argument);
}

TEST_CASE("CSV writers") {
  std::ostringstream metrics;
  const std::vector<MetricSample> samples{{0, MetricKind::RateBps, 3, 1.5e7}};
  write_metrics_csv(metrics, samples);
  CHECK(metrics.str() == "drop,entity,metric,value\n0,3,rate_bps,15000000\n");

  std::ostringstream cdf;
  write_cdf_csv(cdf, empirical_cdf({2.0, 1.0}));
  CHECK(cdf.str() == "value,probability\n1,0.5\n2,1\n");

  std::ostringstream det;
  DetectionRecord rec;
  rec.epoch = 4;
  rec.region = 1;
  rec.cell = 7;
  rec.statistic = 2.0;
  rec.threshold = 1.0;
  rec.decision = true;
  rec.sensing_snr_db = -3.5;
  write_detection_csv(det, std::vector<DetectionRecord>{rec});
  CHECK(det.str() ==
        "drop,epoch,region,cell,statistic,threshold,decision,truth,sensing_snr_db\n0,4,1,7,2,1,1,0,-3.5\n");
}

TEST_CASE("argument parsing") {
  auto cmd = parse({"run", "--config", "exp.cfg", "--seed", "7"});
  CHECK(cmd.kind == CommandKind::Run);
  CHECK(*cmd.config_path == "exp.cfg");
  REQUIRE(cmd.overrides.size() == 1);
  CHECK(cmd.overrides[0] == std::pair<std::string, std::string>{"seed", "7"});

  cmd = parse({"preset-rx-sweep", "--rx", "1,2,3,4"});
  CHECK(cmd.kind == CommandKind::PresetRxSweep);
  CHECK(cmd.rx_counts == std::vector<int>{1, 2, 3, 4});

  cmd = parse({"preset-beamformers"});
  CHECK(cmd.k_zf_values == std::vector<int>{1, 2});

  cmd = parse({"run", "--config", "x", "--set", "T=0", "--mode", "CF", "--rx", "3"});
  CHECK(cmd.overrides == std::vector<std::pair<std::string, std::string>>{
                             {"T", "0"}, {"mode", "CF"}, {"m_rx_per_region", "3"}});

  cmd = parse({"calibrate-pfa", "--rank", "4", "--trials", "1000"});
  CHECK(cmd.rank == 4);
  CHECK(cmd.trials == 1000);

  CHECK(parse_exit_code({"run"}) == 2);
  CHECK(parse_exit_code({"run", "--config", "x", "--bogus"}) == 2);
  CHECK(parse_exit_code({"run", "--config", "x", "--set", "novalue"}) == 2);
  CHECK(parse_exit_code({}) == 2);
  CHECK(parse_exit_code({"--help"}) == 0);
}

TEST_CASE("default output directory") {
  ::setenv("CFISAC_OUT_ROOT", "/tmp/somewhere", 1);
  CHECK(default_output_dir(CommandKind::PresetModes) == "/tmp/somewhere/preset-modes");
  ::unsetenv("CFISAC_OUT_ROOT");
  CHECK(default_output_dir(CommandKind::Run) == "results/run");
}

TEST_CASE("command execution") {
  const auto dir = scratch_dir("exec");
  const auto cfg = write_config(dir, "n_drops = 2\nn_fading = 2\nthreads = 1\n");

  Command validate;
  validate.kind = CommandKind::ValidateConfig;
  validate.config_path = cfg.string();
  CHECK(execute(validate) == 0);
  validate.overrides = {{"M", "-3"}};
  CHECK(execute(validate) == 1);

  Command calib;
  calib.kind = CommandKind::CalibratePfa;
  calib.trials = 1000;
  CHECK(execute(calib) == 0);

  Command missing;
  missing.kind = CommandKind::Run;
  missing.config_path = (dir / "absent.cfg").string();
  missing.out_dir = (dir / "out").string();
  CHECK(execute(missing) == 1);

  const auto blocker = dir / "file";
  std::ofstream(blocker) << "x";
  Command unwritable;
  unwritable.kind = CommandKind::Run;
  unwritable.config_path = cfg.string();
  unwritable.out_dir = (blocker / "sub").string();
  CHECK(execute(unwritable) == 1);

  Command run;
  run.kind = CommandKind::Run;
  run.config_path = cfg.string();
  run.out_dir = (dir / "out").string();
  REQUIRE(execute(run) == 0);
  for (const char* name : {"config.txt", "summary.txt", "run_config.txt", "run_metrics.csv", "run_rate_cdf.csv",
                           "run_snr_cdf.csv", "run_detections.csv"})
    CHECK(fs::exists(dir / "out" / name));
  CHECK(first_line(dir / "out" / "run_metrics.csv") == "drop,entity,metric,value");
  CHECK(first_line(dir / "out" / "run_rate_cdf.csv") == "value,probability");

  // The echoed config reproduces the run.
  const auto echoed = load_config((dir / "out" / "run_config.txt").string());
  CHECK(to_text(echoed) == to_text(load_config(cfg.string())));
  fs::remove_all(dir);
}

TEST_CASE("command-line tool exit codes") {
  const auto dir = scratch_dir("tool");
  const auto cfg = write_config(dir, "n_drops = 1\nn_fading = 1\nthreads = 1\n");
  CHECK(run_tool("--help") == 0);
  CHECK(run_tool("run") == 2);
  CHECK(run_tool("frobnicate") == 2);
  CHECK(run_tool("validate-config --config " + cfg.string()) == 0);
  CHECK(run_tool("validate-config --config " + cfg.string() + " --set M=-3") == 1);
  CHECK(run_tool("run --config " + cfg.string() + " --out " + (dir / "o").string()) == 0);
  CHECK(fs::exists(dir / "o" / "run_detections.csv"));
  fs::remove_all(dir);
}

TEST_CASE("result directory for several arms") {
  const auto dir = scratch_dir("arms");
  auto config = tiny_config();
  config.n_drops = 1;
  config.n_fading = 1;
  std::vector<ResultSet> arms{run_experiment(config, "A"), run_experiment(config, "B")};
  write_result_directory(dir, arms);
  CHECK(fs::exists(dir / "A_metrics.csv"));
  CHECK(fs::exists(dir / "B_detections.csv"));
  std::ifstream summary(dir / "summary.txt");
  std::stringstream text;
  text << summary.rdbuf();
  CHECK(text.str().find("arm: A") != std::string::npos);
  CHECK(text.str().find("arm: B") != std::string::npos);
  fs::remove_all(dir);
}
