// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cfisac/config.hpp"
#include "cfisac/deployment.hpp"
#include "cfisac/random.hpp"
#include "cfisac/types.hpp"

#include <map>
#include <utility>
#include <vector>

namespace cfisac {

struct ArrayGeometry {
  int n_antennas = 8;
  double spacing_wavelengths = 0.5;
  double broadside_azimuth = 0.0;
};

enum class LinkKind { UeApNlos, ApApLos, ApTargetLos };

/// Deterministic part of the 3GPP TR 36.814 UMi pathloss in dB. Distances below 1 m are
/// clamped to 1 m.
///   NLoS: 36.7 log10(d) + 22.7 + 26 log10(f_GHz)
///   LoS:  22.0 log10(d) + 28.0 + 20 log10(f_GHz)
double pathloss_db(double distance_3d, LinkKind link, double carrier_hz);

/// ULA response: entry i = exp(j 2 pi spacing i sin(az - broadside) cos(el)).
CVector steering_vector(const ArrayGeometry& geom, double azimuth, double elevation);
CVector steering_vector(const ArrayGeometry& geom, const Angles& angles);

/// Rayleigh UE-AP channel: sqrt(large_scale) * CN(0, I_N).
CVector draw_ue_ap_channel(double large_scale, const ArrayGeometry& geom, RandomStream& rng);

/// Rician AP-AP matrix mapping the tx AP signal onto the rx AP array:
/// sqrt(ls) (sqrt(K/(K+1)) a_rx a_tx^H + sqrt(1/(K+1)) W). An infinite K gives the pure LoS term.
CMatrix draw_ap_ap_channel(double large_scale, const CVector& rx_steering,
                           const CVector& tx_steering, double rician_k, RandomStream& rng);
CMatrix draw_ap_ap_channel(double large_scale, const ArrayGeometry& tx_geom,
                           const Position3D& tx_pos, const ArrayGeometry& rx_geom,
                           const Position3D& rx_pos, double rician_k, RandomStream& rng);

struct RcsModel {
  double variance = 10.0;         // m^2
  double angular_corr_std = 0.0;  // radians
};

/// Angle at `target` between the directions to `a` and to `b`.
double view_angle(const Position3D& target, const Position3D& a, const Position3D& b);

/// Gaussian angle-of-view kernel exp(-dpsi^2 / (2 std^2)) over a set of APs.
Eigen::MatrixXd rcs_angle_kernel(const Position3D& target, const std::vector<Position3D>& aps,
                                 double angular_corr_std);

/// Symmetric square root S (S S^T = C) of a PSD matrix. Eigenvalues slightly below zero
/// from rounding are clipped; anything more negative throws InternalError.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& covariance);

/// Square-root factors of the separable RCS covariance for one reflector.
/// cov(alpha[m, m'], alpha[n, n']) = variance * Krx(m, n) * Ktx(m', n').
struct RcsFactors {
  double variance = 0.0;
  Eigen::MatrixXd rx_sqrt;
  Eigen::MatrixXd tx_sqrt;

  /// alpha as an (rx x tx) matrix.
  CMatrix draw(RandomStream& rng) const;
};

RcsFactors rcs_factors(const Position3D& target, const std::vector<Position3D>& tx_aps,
                       const std::vector<Position3D>& rx_aps, const RcsModel& model);

/// Jointly Gaussian reflectivities for every (rx m, tx m') pair, as an (rx x tx) matrix.
CMatrix draw_correlated_rcs(const Position3D& target, const std::vector<Position3D>& tx_aps,
                            const std::vector<Position3D>& rx_aps, const RcsModel& model,
                            RandomStream& rng);

/// Covariance of alpha[m, .] across the tx APs for a fixed rx AP: variance * Ktx.
Eigen::MatrixXd rcs_tx_covariance(const Position3D& target, const std::vector<Position3D>& tx_aps,
                                  const RcsModel& model);

struct TargetLink {
  Complex alpha;
  double beta = 0.0;  // product of the two one-way path gains
  CVector tx_steering;
  CVector rx_steering;
};

/// alpha sqrt(beta) a_rx a_tx^H.
CMatrix composite_target_channel(const TargetLink& link);

/// Per-drop geometry of one reflector (a target or a range-cell center) seen by every AP.
struct ReflectorGeometry {
  Position3D position;
  std::vector<double> one_way_gain;  // per AP, linear
  std::vector<CVector> steering;     // per AP, array response towards the reflector
};

ReflectorGeometry reflector_geometry(const Position3D& position,
                                     const std::vector<Position3D>& aps,
                                     const std::vector<ArrayGeometry>& geoms,
                                     double carrier_hz);

std::vector<ArrayGeometry> ap_arrays(const NetworkLayout& layout, const ExperimentConfig& config);

/// K x M linear large-scale gains: UMi NLoS pathloss with log-normal shadowing.
Eigen::MatrixXd draw_large_scale(const NetworkLayout& layout, const ExperimentConfig& config,
                                 RandomStream& rng);

/// AP-AP direct-path matrices drawn on first use from a per-pair stream, so the draw for a
/// pair never depends on which other pairs were requested. Not thread-safe.
class DirectPaths {
 public:
  DirectPaths(std::uint64_t seed, const NetworkLayout* layout,
              const std::vector<ArrayGeometry>* geoms, double carrier_hz, double rician_k)
      : seed_(seed), layout_(layout), geoms_(geoms), carrier_(carrier_hz), rician_k_(rician_k) {}

  const CMatrix& get(int tx, int rx) const;

 private:
  std::uint64_t seed_;
  const NetworkLayout* layout_;
  const std::vector<ArrayGeometry>* geoms_;
  double carrier_;
  double rician_k_;
  mutable std::map<std::pair<int, int>, CMatrix> cache_;
};

/// One coherence interval of UE-AP fading. Index h as k * M + m.
struct ChannelRealization {
  int K = 0;
  int M = 0;
  std::vector<CVector> h;

  const CVector& ue_ap(int k, int m) const {
    return h[static_cast<std::size_t>(k) * static_cast<std::size_t>(M) + static_cast<std::size_t>(m)];
  }
};

ChannelRealization draw_ue_ap_channels(const Eigen::MatrixXd& large_scale,
                                       const std::vector<ArrayGeometry>& geoms, RandomStream& rng);

}  // namespace cfisac
