// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cfisac/channel.hpp"
#include "cfisac/random.hpp"
#include "cfisac/types.hpp"

#include <span>
#include <vector>

namespace cfisac {

/// Echo dictionary of one receive AP for one hypothesized position, and an orthonormal
/// basis of its column space.
struct Dictionary {
  int rx_ap = -1;
  CMatrix columns;                 // N x |tx|
  CMatrix basis;                   // N x rank, left singular vectors
  Eigen::VectorXd singular_values; // rank
  CMatrix right;                   // |tx| x rank, right singular vectors
  int rank = 0;
};

inline constexpr double kRankTolerance = 1e-10;

/// Thin SVD of D, keeping singular values above rank_tol * sigma_max.
Dictionary dictionary_from_columns(CMatrix columns, int rx_ap = -1,
                                   double rank_tol = kRankTolerance);

/// Column m' = sqrt(beta_{m,m'}) a_rx (a_tx^H s_{m'}) with every angle and gain taken at the
/// hypothesized position (the range-cell center). transmit[m'] is the signal of AP m'.
Dictionary build_dictionary(const ReflectorGeometry& cell, int rx_ap, std::span<const int> tx_aps,
                            const std::vector<CVector>& transmit);

/// sum_m || U_m^H y_m ||^2. Throws std::domain_error on a count or dimension mismatch.
double glrt_statistic(std::span<const Dictionary> dicts, std::span<const CVector> observables);

/// Least-squares reflectivity estimate (D^H D)^-1 D^H y; minimum-norm solution when D is
/// rank deficient.
CVector ml_alpha_estimate(const Dictionary& dict, const CVector& observable);

/// Threshold for a statistic that is Gamma(total_rank, noise_var) under H0:
/// noise_var * Q^-1(total_rank, pfa), Q the upper regularized incomplete gamma function.
double calibrate_threshold(int total_rank, double noise_var, double target_pfa);

/// Same threshold as the empirical (1 - pfa) quantile of simulated H0 statistics.
double calibrate_threshold_monte_carlo(int total_rank, double noise_var, double target_pfa,
                                       long trials, RandomStream& rng);

/// sum_m trace(D_m^H D_m R_m) / (|rx| N noise_var).
double sensing_snr(std::span<const Dictionary> dicts, std::span<const Eigen::MatrixXd> rcs_cov,
                   double noise_var);

/// Variant that normalizes by the projected noise actually present: sum_m rank_m noise_var.
double sensing_snr_thin(std::span<const Dictionary> dicts,
                        std::span<const Eigen::MatrixXd> rcs_cov, double noise_var);

inline bool detect(double statistic, double threshold) { return statistic > threshold; }

/// Result of inspecting one cell with its cluster's receive APs.
struct DetectionOutcome {
  double statistic = 0.0;
  double threshold = 0.0;
  bool decision = false;
  int rank = 0;                    // sum of dictionary ranks
  std::vector<CVector> alpha_hat;  // per receive AP
  double sensing_snr = 0.0;        // linear
};

/// Statistic, analytic threshold at target_pfa, decision, ML estimates and SNR for one cell.
/// A cluster with zero total rank never declares a detection.
DetectionOutcome inspect_cell(std::span<const Dictionary> dicts, std::span<const CVector> observables,
                              std::span<const Eigen::MatrixXd> rcs_cov, double noise_var,
                              double target_pfa);

/// Echo of one reflector as seen by one receive AP: alpha[i] is the reflectivity on the
/// path from tx_aps[i] to the receive AP.
struct TargetEcho {
  const ReflectorGeometry* geometry = nullptr;
  CVector alpha;
};

struct ObservableInputs {
  int rx_ap = -1;
  int n_antennas = 0;
  std::span<const int> tx_aps;
  const std::vector<CVector>* transmit = nullptr;  // per AP
  std::span<const TargetEcho> echoes;
  const DirectPaths* direct = nullptr;
  double direct_scale = 0.0;  // 0 for exact subtraction, 1 for the raw observable
  double noise_var = 0.0;
};

/// y_m = sum_targets sum_{m'} H_{t,m,m'} s_{m'} + direct_scale * sum_{m'} G_{m',m} s_{m'} + z.
CVector simulate_rx_observable(const ObservableInputs& in, RandomStream& noise_rng);

}  // namespace cfisac
