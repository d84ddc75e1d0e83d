// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cfisac/types.hpp"

#include <cstdint>
#include <istream>
#include <map>
#include <string>

namespace cfisac {

/// Complete description of one experiment arm. Defaults reproduce the baseline
/// deployment: 1 km^2, 64 APs with 8-antenna ULAs, 32 UEs, 8 targets, 4 regions.
struct ExperimentConfig {
  // Network size
  int M = 64;
  int K = 32;
  int T = 8;
  int L = 4;
  int N = 8;
  int q_serving = 4;
  int m_tx_per_region = 6;
  int m_rx_per_region = 2;
  int k_zf = 0;
  ScalabilityMode mode = ScalabilityMode::UTC;
  SensingBeamformer beamformer = SensingBeamformer::MF;

  // Radio
  double P_m = 2.0;               // W per AP
  double bandwidth = 20e6;        // Hz
  double carrier = 2e9;           // Hz
  double noise_density_dbm_hz = -174.0;
  double sigma_rcs_dbsm = 10.0;
  double rician_k_db = 10.0;
  double angular_corr_deg = 10.0;
  double shadowing_std_db = 4.0;  // UE-AP links only
  double antenna_spacing = 0.5;   // wavelengths
  bool random_orientation = false;

  // Geometry
  double area_side_m = 1000.0;
  double ap_height_m = 10.0;
  double ue_height_m = 1.65;
  double target_height_min_m = 20.0;
  double target_height_max_m = 200.0;
  double cell_extent_m = 125.0;
  bool bandwidth_matched_cells = false;
  double inspection_height_m = 110.0;

  // Detection
  double pfa_target = 0.01;
  int snapshots = 1;
  bool subtract_direct = true;
  double direct_residual = 0.0;  // fraction of the direct path left after subtraction
  double sensing_share = -1.0;   // < 0: equal split across beams
  bool report_thin_snr = false;

  // Monte Carlo
  int n_drops = 100;
  int n_fading = 100;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency

  double noise_power_w() const;
  double sigma_rcs_linear() const { return db_to_linear(sigma_rcs_dbsm); }
  double rician_k_linear() const { return db_to_linear(rician_k_db); }
  double angular_corr_rad() const { return angular_corr_deg * kPi / 180.0; }
  double effective_cell_extent() const;
};

/// Shortest of %.15g, %.16g, %.17g that parses back to v exactly.
std::string format_double(double v);

/// Range resolution c / (2B).
double range_resolution(double bandwidth_hz);

/// Throws ConfigError naming the first violated constraint.
void validate(const ExperimentConfig& config);

/// Applies one key=value assignment. Throws ConfigError on unknown keys or bad values.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Parses the flat key=value format ('#' starts a comment, blank lines ignored).
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path);

/// Canonical key=value rendering; parse_config(to_text(c)) reproduces c exactly.
std::string to_text(const ExperimentConfig& config);

}  // namespace cfisac
