// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cfisac/channel.hpp"
#include "cfisac/clustering.hpp"
#include "cfisac/config.hpp"
#include "cfisac/types.hpp"

#include <span>
#include <vector>

namespace cfisac {

/// Per-AP downlink beamformers and powers for one epoch.
struct BeamformingPlan {
  int K = 0;
  int M = 0;
  int N = 0;
  std::vector<CVector> comm_beams;  // k * M + m; empty when m does not serve k
  Eigen::MatrixXd powers;           // K x M, eta_{k,m}
  std::vector<CVector> sense_beams; // per AP; empty when the AP does not sense
  std::vector<double> sense_powers; // per AP, eta_{0,m}
  double P_m = 0.0;

  const CVector& comm_beam(int k, int m) const {
    return comm_beams[static_cast<std::size_t>(k) * static_cast<std::size_t>(M) + static_cast<std::size_t>(m)];
  }
  /// eta_{0,m} + sum_k eta_{k,m}.
  double total_power(int m) const;
};

/// w = h / ||h||. Throws std::domain_error for a zero channel.
CVector mf_comm_beam(const CVector& h);

/// Steering vector towards the cell center, normalized to unit norm.
CVector mf_sense_beam(const ArrayGeometry& geom, const Position3D& cell_center,
                      const Position3D& ap_position);

struct ZfBeam {
  CVector beam;
  bool fallback = false;       // projection vanished; beam is the MF beam
  std::vector<int> annulled;   // positions (into the input channel list) that were nulled
};

/// Partial zero-forcing: the MF steering vector projected onto the orthogonal complement of
/// the k_zf input channels with the largest gains, renormalized.
/// Requires k_zf <= min(N - 1, channels.size()).
ZfBeam zf_sense_beam(const ArrayGeometry& geom, const Position3D& cell_center,
                     const Position3D& ap_position, std::span<const CVector> ue_channels,
                     std::span<const double> ue_gains, int k_zf);

struct PowerSplit {
  double per_ue = 0.0;
  double sensing = 0.0;
};

/// Equal split over n_served + (sensing_active ? 1 : 0) beams. A sensing_share in [0, 1]
/// instead reserves sensing_share * P for sensing and splits the rest over the UEs.
PowerSplit allocate_power(double P_m, int n_served, bool sensing_active, double sensing_share = -1.0);

struct PlanDiagnostics {
  long zf_beams = 0;
  long zf_fallbacks = 0;
  long annulled_links = 0;
  double max_normalized_leakage = 0.0;  // max |h^H w| / ||h|| over annulled UEs
};

/// Builds MF communication beams, sensing beams towards each AP's assigned cell, and the
/// power split. cell_centers[l] is the center of the cell region l inspects this epoch.
BeamformingPlan build_plan(const ChannelRealization& channels, const Eigen::MatrixXd& large_scale,
                           const ClusterAssignment& assignment, const NetworkLayout& layout,
                           const std::vector<ArrayGeometry>& geoms,
                           const std::vector<Position3D>& cell_centers,
                           const ExperimentConfig& config, PlanDiagnostics* diagnostics = nullptr);

/// s_m = sum_k sqrt(eta_km) w_km x_k + sqrt(eta_0m) w_0m x_0m.
/// data_symbols is indexed by UE, sense_symbols by AP.
CVector transmit_vector(const BeamformingPlan& plan, int m, std::span<const Complex> data_symbols,
                        std::span<const Complex> sense_symbols);

}  // namespace cfisac
