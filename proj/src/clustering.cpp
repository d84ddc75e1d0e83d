// SPDX-License-Identifier: Apache-2.0

#include "cfisac/clustering.hpp"

#include <algorithm>
#include <numeric>

namespace cfisac {

namespace {

// Unclaimed APs sorted by horizontal distance to `center`, ties by index.
std::vector<int> rank_unclaimed(const NetworkLayout& layout, const std::vector<bool>& claimed,
                                const Position3D& center) {
  std::vector<int> order;
  for (std::size_t m = 0; m < layout.aps.size(); ++m)
    if (!claimed[m]) order.push_back(static_cast<int>(m));
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return horizontal_distance(layout.aps[static_cast<std::size_t>(a)], center) <
           horizontal_distance(layout.aps[static_cast<std::size_t>(b)], center);
  });
  return order;
}

}  // namespace

ApModes assign_ap_modes(const NetworkLayout& layout, ScalabilityMode mode, int m_tx_per_region,
                        int m_rx_per_region) {
  if (m_rx_per_region < 1) throw ConfigError("m_rx_per_region must be at least 1 (no echo receivers)");
  if (m_tx_per_region < 1) throw ConfigError("m_tx_per_region must be at least 1");
  const int M = static_cast<int>(layout.aps.size());
  const int L = static_cast<int>(layout.regions.size());
  const bool scalable_sensing = target_centric(mode);
  const int claim_per_region = scalable_sensing ? m_tx_per_region + m_rx_per_region : m_rx_per_region;
  if (static_cast<long>(claim_per_region) * L > M || (!scalable_sensing && m_rx_per_region * L >= M))
    throw ConfigError("not enough APs for " + std::to_string(L) + " regions with " +
                      std::to_string(m_tx_per_region) + " tx + " + std::to_string(m_rx_per_region) +
                      " rx each (M = " + std::to_string(M) + ")");

  ApModes out;
  std::vector<bool> claimed(static_cast<std::size_t>(M), false);
  std::vector<bool> rx(static_cast<std::size_t>(M), false);
  out.beam_region.assign(static_cast<std::size_t>(M), -1);
  out.sensing_clusters.resize(static_cast<std::size_t>(L));

  for (int l = 0; l < L; ++l) {
    const auto& region = layout.regions[static_cast<std::size_t>(l)];
    const auto ranked = rank_unclaimed(layout, claimed, region.bounds.center(0.0));
    auto& cluster = out.sensing_clusters[static_cast<std::size_t>(l)];
    for (int i = 0; i < claim_per_region; ++i) {
      const int m = ranked[static_cast<std::size_t>(i)];
      claimed[static_cast<std::size_t>(m)] = true;
      if (i < m_rx_per_region) {
        rx[static_cast<std::size_t>(m)] = true;
      } else {
        out.beam_region[static_cast<std::size_t>(m)] = l;
      }
      cluster.push_back(m);
    }
  }

  for (int m = 0; m < M; ++m) (rx[static_cast<std::size_t>(m)] ? out.rx_aps : out.tx_aps).push_back(m);

  if (scalable_sensing) {
    for (auto& c : out.sensing_clusters) std::sort(c.begin(), c.end());
  } else {
    std::vector<int> all(static_cast<std::size_t>(M));
    std::iota(all.begin(), all.end(), 0);
    for (auto& c : out.sensing_clusters) c = all;
    for (const int m : out.tx_aps) {
      const auto& p = layout.aps[static_cast<std::size_t>(m)];
      out.beam_region[static_cast<std::size_t>(m)] = region_of(layout.regions, p.x, p.y);
    }
  }
  return out;
}

UeAssociation associate_ues(const Eigen::MatrixXd& large_scale, const std::vector<int>& tx_aps,
                            int q, ScalabilityMode mode) {
  const int K = static_cast<int>(large_scale.rows());
  const int M = static_cast<int>(large_scale.cols());
  UeAssociation out;
  out.serving.resize(static_cast<std::size_t>(K));
  out.served.resize(static_cast<std::size_t>(M));

  const bool scalable = user_centric(mode);
  if (scalable && (q < 1 || q > static_cast<int>(tx_aps.size())))
    throw ConfigError("q_serving must lie in [1, |M_tx|] (|M_tx| = " + std::to_string(tx_aps.size()) + ")");

  for (int k = 0; k < K; ++k) {
    auto& mk = out.serving[static_cast<std::size_t>(k)];
    if (!scalable) {
      mk = tx_aps;
    } else {
      std::vector<int> order = tx_aps;
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return large_scale(k, a) > large_scale(k, b); });
      mk.assign(order.begin(), order.begin() + q);
      std::sort(mk.begin(), mk.end());
    }
    for (const int m : mk) out.served[static_cast<std::size_t>(m)].push_back(k);
  }
  return out;
}

ClusterAssignment build_assignment(const NetworkLayout& layout, const Eigen::MatrixXd& large_scale,
                                   const ExperimentConfig& config) {
  auto modes = assign_ap_modes(layout, config.mode, config.m_tx_per_region, config.m_rx_per_region);
  auto assoc = associate_ues(large_scale, modes.tx_aps, config.q_serving, config.mode);

  ClusterAssignment a;
  a.mode = config.mode;
  a.M = static_cast<int>(layout.aps.size());
  a.is_rx.assign(static_cast<std::size_t>(a.M), false);
  for (const int m : modes.rx_aps) a.is_rx[static_cast<std::size_t>(m)] = true;
  a.tx_aps = std::move(modes.tx_aps);
  a.rx_aps = std::move(modes.rx_aps);
  a.sensing_clusters = std::move(modes.sensing_clusters);
  a.beam_region = std::move(modes.beam_region);
  a.serving = std::move(assoc.serving);
  a.served = std::move(assoc.served);
  return a;
}

ClusterSplit sensing_cluster_for_cell(const ClusterAssignment& assignment, int region) {
  if (region < 0 || region >= static_cast<int>(assignment.sensing_clusters.size()))
    throw std::out_of_range("sensing_cluster_for_cell: region index out of range");
  ClusterSplit split;
  for (const int m : assignment.sensing_clusters[static_cast<std::size_t>(region)])
    (assignment.is_rx[static_cast<std::size_t>(m)] ? split.rx : split.tx).push_back(m);
  return split;
}

}  // namespace cfisac
