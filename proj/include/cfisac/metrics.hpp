// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cfisac/channel.hpp"
#include "cfisac/clustering.hpp"
#include "cfisac/precoding.hpp"
#include "cfisac/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cfisac {

enum class MetricKind { RateBps, SensingSnrDb, Statistic, Decision, SensingSnrThinDb };

std::string to_string(MetricKind kind);

struct MetricSample {
  int drop = 0;
  MetricKind kind = MetricKind::RateBps;
  int entity = 0;  // UE index for rates, region index otherwise
  double value = 0.0;

  friend bool operator==(const MetricSample&, const MetricSample&) = default;
};

/// One (drop, epoch, region) inspection.
struct DetectionRecord {
  int drop = 0;
  int epoch = 0;
  int region = 0;
  int cell = 0;
  double statistic = 0.0;
  double threshold = 0.0;
  bool decision = false;
  bool truth = false;
  double sensing_snr_db = 0.0;

  friend bool operator==(const DetectionRecord&, const DetectionRecord&) = default;
};

struct CdfCurve {
  std::vector<double> values;         // ascending
  std::vector<double> probabilities;  // i / n

  /// Smallest value whose cumulative probability reaches p.
  double quantile(double p) const;
};

/// Downlink SINR of UE k with coherent combining over its serving APs, inter-UE interference
/// and sensing-beam interference from every transmit AP.
double communication_sinr(const ChannelRealization& channels, const BeamformingPlan& plan,
                          const ClusterAssignment& assignment, int k, double noise_var);

std::vector<double> communication_sinrs(const ChannelRealization& channels,
                                        const BeamformingPlan& plan,
                                        const ClusterAssignment& assignment, double noise_var);

/// Shannon mapping B log2(1 + sinr).
double rate_bps(double sinr, double bandwidth_hz);

struct DetectionRates {
  std::optional<double> pd;   // empty when no cell had a target
  std::optional<double> pfa;  // empty when every cell had a target
  long present = 0;
  long absent = 0;
};

DetectionRates detection_rates(std::span<const DetectionRecord> log);

struct FronthaulLoad {
  std::vector<int> per_rx_ap;  // scalars per epoch, aligned with assignment.rx_aps
  int max = 0;
  double mean = 0.0;
};

/// Each receive AP reports one partial statistic per sensing cluster it belongs to.
FronthaulLoad fronthaul_load(const ClusterAssignment& assignment);

/// Per-AP load figures that must stay bounded for a scalable deployment.
struct ApLoad {
  int max_served_ues = 0;
  int max_cluster_membership = 0;
  int max_fronthaul_scalars = 0;
  double mean_served_ues = 0.0;
};

ApLoad ap_load(const ClusterAssignment& assignment);

CdfCurve empirical_cdf(std::vector<double> samples);

/// Median via the empirical CDF (lower median for even counts).
double median(std::vector<double> samples);

}  // namespace cfisac
