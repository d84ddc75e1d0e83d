// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cfisac/config.hpp"
#include "cfisac/deployment.hpp"
#include "cfisac/types.hpp"

#include <vector>

namespace cfisac {

/// Transmit/receive partition of the APs and the per-region sensing clusters.
struct ApModes {
  std::vector<int> tx_aps;                         // ascending
  std::vector<int> rx_aps;                         // ascending
  std::vector<std::vector<int>> sensing_clusters;  // per region, ascending AP indices
  std::vector<int> beam_region;                    // per AP: region its sensing beam points at, -1 if none
};

struct UeAssociation {
  std::vector<std::vector<int>> serving;  // per UE: M_k, ascending
  std::vector<std::vector<int>> served;   // per AP: K_m, ascending
};

struct ClusterAssignment {
  ScalabilityMode mode = ScalabilityMode::UTC;
  int M = 0;
  std::vector<int> tx_aps;
  std::vector<int> rx_aps;
  std::vector<bool> is_rx;
  std::vector<std::vector<int>> serving;
  std::vector<std::vector<int>> served;
  std::vector<std::vector<int>> sensing_clusters;
  std::vector<int> beam_region;
};

struct ClusterSplit {
  std::vector<int> tx;
  std::vector<int> rx;
};

/// UTC/TC: regions in ascending order claim the unclaimed APs nearest their center; the
/// m_rx nearest become receive APs and the next m_tx its transmit sensing APs.
/// UC/CF: the same claim order picks only the m_rx receive APs per region; every other AP
/// transmits and every AP belongs to every region's cluster. A transmit AP then points its
/// sensing beam at the region that contains it.
/// Throws ConfigError when m_rx is zero or the AP count is insufficient.
ApModes assign_ap_modes(const NetworkLayout& layout, ScalabilityMode mode, int m_tx_per_region,
                        int m_rx_per_region);

/// UTC/UC: top-q transmit APs by large-scale gain (ties to the lower index).
/// TC/CF: every transmit AP serves every UE.
UeAssociation associate_ues(const Eigen::MatrixXd& large_scale, const std::vector<int>& tx_aps,
                            int q, ScalabilityMode mode);

ClusterAssignment build_assignment(const NetworkLayout& layout, const Eigen::MatrixXd& large_scale,
                                   const ExperimentConfig& config);

/// Transmit and receive members of region l's sensing cluster.
ClusterSplit sensing_cluster_for_cell(const ClusterAssignment& assignment, int region);

}  // namespace cfisac
