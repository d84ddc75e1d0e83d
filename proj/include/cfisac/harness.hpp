// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cfisac/config.hpp"
#include "cfisac/metrics.hpp"
#include "cfisac/precoding.hpp"

#include <string>
#include <vector>

namespace cfisac {

/// Bookkeeping that acceptance checks read back after a run.
struct RunDiagnostics {
  long plans = 0;
  long power_checks = 0;
  long power_violations = 0;
  double max_power_error = 0.0;  // max |sum eta - P| / P over active APs
  PlanDiagnostics zf;
  int max_fronthaul_scalars = 0;
  double mean_fronthaul_scalars = 0.0;  // averaged over drops

  void merge(const RunDiagnostics& other, int drops_before, int drops_other);
};

struct DropResult {
  int drop = 0;
  std::vector<MetricSample> samples;
  std::vector<DetectionRecord> detections;
  RunDiagnostics diagnostics;
  std::vector<Position3D> ap_positions;  // layout fingerprint for common-random-number checks
};

struct ResultSet {
  std::string label;
  ExperimentConfig config;
  std::vector<MetricSample> samples;
  std::vector<DetectionRecord> detections;
  CdfCurve rate_cdf;
  CdfCurve snr_cdf;
  DetectionRates detection;
  RunDiagnostics diagnostics;
  std::vector<std::vector<Position3D>> layouts;  // AP positions per drop

  std::vector<double> values(MetricKind kind) const;
  double median(MetricKind kind) const;
};

/// One network realization: layout, assignment, then n_fading epochs. Deterministic in
/// (config.seed, drop_index) and independent of every other drop.
DropResult run_drop(const ExperimentConfig& config, int drop_index);

/// All drops (spread over config.threads workers), merged in drop order.
ResultSet run_experiment(const ExperimentConfig& config, const std::string& label = "run");

/// UTC, UC, TC and CF arms with common random numbers.
std::vector<ResultSet> preset_mode_comparison(const ExperimentConfig& config);

/// One UTC arm per receive-AP count at the fixed cluster size m_tx + m_rx of `config`.
std::vector<ResultSet> preset_rx_sweep(const ExperimentConfig& config, const std::vector<int>& rx_counts);

/// An MF arm followed by one ZF arm per k_zf value.
std::vector<ResultSet> preset_beamformer_comparison(const ExperimentConfig& config,
                                                    const std::vector<int>& k_zf_values);

}  // namespace cfisac
