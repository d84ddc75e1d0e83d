// SPDX-License-Identifier: Apache-2.0

#include "cfisac/harness.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>

using namespace cfisac;
using cfisac::test::tiny_config;

namespace {

long count_kind(const std::vector<MetricSample>& samples, MetricKind kind) {
  return std::count_if(samples.begin(), samples.end(), [&](const MetricSample& s) { return s.kind == kind; });
}

}  // namespace

TEST_CASE("sample counts for a minimal drop") {
  ExperimentConfig config = tiny_config();
  config.K = 2;
  config.T = 0;
  config.n_fading = 1;
  const auto drop = run_drop(config, 0);
  CHECK(count_kind(drop.samples, MetricKind::RateBps) == 2);
  CHECK(count_kind(drop.samples, MetricKind::Statistic) == config.L);
  CHECK(count_kind(drop.samples, MetricKind::SensingSnrThinDb) == 0);
  REQUIRE(drop.detections.size() == static_cast<std::size_t>(config.L));
  for (const auto& rec : drop.detections) {
    CHECK_FALSE(rec.truth);
    CHECK(rec.threshold > 0.0);
    CHECK(rec.decision == (rec.statistic > rec.threshold));
  }
}

TEST_CASE("baseline sample counts scale with drops and fading") {
  const auto config = tiny_config();
  const auto result = run_experiment(config, "tiny");
  const long realizations = static_cast<long>(config.n_drops) * config.n_fading;
  CHECK(count_kind(result.samples, MetricKind::RateBps) == realizations * config.K);
  CHECK(count_kind(result.samples, MetricKind::SensingSnrDb) == realizations * config.L);
  CHECK(result.detections.size() == static_cast<std::size_t>(realizations * config.L));
  CHECK(result.rate_cdf.values.size() == static_cast<std::size_t>(realizations * config.K));
  CHECK(result.layouts.size() == static_cast<std::size_t>(config.n_drops));
  CHECK(result.detection.present + result.detection.absent == realizations * config.L);
  CHECK(result.diagnostics.plans == realizations);
  CHECK(result.diagnostics.power_violations == 0);
  CHECK(result.diagnostics.max_fronthaul_scalars == 1);

  // Epoch f scans cell schedule(f); records come out in drop, epoch, region order.
  for (std::size_t i = 0; i < result.detections.size(); ++i) {
    const auto& rec = result.detections[i];
    CHECK(rec.region == static_cast<int>(i % static_cast<std::size_t>(config.L)));
    CHECK(rec.epoch == static_cast<int>((i / static_cast<std::size_t>(config.L)) % static_cast<std::size_t>(config.n_fading)));
  }
}

TEST_CASE("thin SNR is reported only on request") {
  ExperimentConfig config = tiny_config();
  config.n_drops = 1;
  config.report_thin_snr = true;
  const auto drop = run_drop(config, 0);
  CHECK(count_kind(drop.samples, MetricKind::SensingSnrThinDb) == config.n_fading * config.L);
}

TEST_CASE("runs are deterministic in the seed") {
  const auto config = tiny_config();
  const auto a = run_experiment(config);
  const auto b = run_experiment(config);
  CHECK(a.samples == b.samples);
  CHECK(a.detections == b.detections);

  ExperimentConfig other = config;
  other.seed = config.seed + 1;
  const auto c = run_experiment(other);
  CHECK(c.samples.size() == a.samples.size());
  CHECK(c.samples != a.samples);
}

TEST_CASE("worker count does not change results") {
  ExperimentConfig config = tiny_config();
  config.n_drops = 4;
  const auto serial = run_experiment(config);
  config.threads = 3;
  const auto parallel = run_experiment(config);
  CHECK(serial.samples == parallel.samples);
  CHECK(serial.detections == parallel.detections);
}

TEST_CASE("a drop does not depend on the other drops") {
  ExperimentConfig config = tiny_config();
  config.n_drops = 3;
  const auto all = run_experiment(config);
  const auto third = run_drop(config, 2);
  std::vector<MetricSample> tail;
  for (const auto& s : all.samples)
    if (s.drop == 2) tail.push_back(s);
  CHECK(tail == third.samples);
}

TEST_CASE("preset arms share layouts") {
  ExperimentConfig config = tiny_config();
  const auto arms = preset_mode_comparison(config);
  REQUIRE(arms.size() == 4);
  CHECK(arms[0].label == "UTC");
  CHECK(arms[3].label == "CF");
  for (const auto& arm : arms) CHECK(arm.layouts == arms[0].layouts);

  const auto sweep = preset_rx_sweep(config, {1, 3});
  REQUIRE(sweep.size() == 2);
  CHECK(sweep[0].label == "rx1");
  CHECK(sweep[1].config.m_tx_per_region == 5);
  CHECK(sweep[1].config.m_rx_per_region == 3);
  CHECK(sweep[0].layouts == arms[0].layouts);

  const auto bf = preset_beamformer_comparison(config, {1});
  REQUIRE(bf.size() == 2);
  CHECK(bf[0].label == "MF");
  CHECK(bf[1].label == "ZF_k1");
  CHECK(bf[1].layouts == bf[0].layouts);
  CHECK(bf[1].diagnostics.zf.zf_beams > 0);
}

TEST_CASE("preset argument validation") {
  const auto config = tiny_config();
  CHECK_THROWS_AS(preset_rx_sweep(config, {0}), ConfigError);
  CHECK_THROWS_AS(preset_rx_sweep(config, {8}), ConfigError);
  CHECK_THROWS_AS(preset_beamformer_comparison(config, {8}), ConfigError);
  CHECK_THROWS_AS(preset_beamformer_comparison(config, {-1}), ConfigError);
  ExperimentConfig bad = config;
  bad.n_drops = 0;
  CHECK_THROWS_AS(run_experiment(bad), ConfigError);
}

TEST_CASE("zero-order ZF reproduces MF") {
  ExperimentConfig config = tiny_config();
  const auto mf = run_experiment(config);
  config.beamformer = SensingBeamformer::ZF;
  config.k_zf = 0;
  const auto zf = run_experiment(config);
  CHECK(mf.samples == zf.samples);
  CHECK(mf.detections == zf.detections);
}

TEST_CASE("raw observables without direct-path subtraction raise the statistic") {
  ExperimentConfig config = tiny_config();
  config.n_drops = 1;
  const auto clean = run_drop(config, 0);
  config.subtract_direct = false;
  const auto raw = run_drop(config, 0);
  REQUIRE(clean.detections.size() == raw.detections.size());
  double clean_sum = 0.0, raw_sum = 0.0;
  for (std::size_t i = 0; i < clean.detections.size(); ++i) {
    clean_sum += clean.detections[i].statistic;
    raw_sum += raw.detections[i].statistic;
  }
  CHECK(raw_sum > clean_sum);
}
