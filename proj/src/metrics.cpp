// SPDX-License-Identifier: Apache-2.0

#include "cfisac/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cfisac {

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::RateBps: return "rate_bps";
    case MetricKind::SensingSnrDb: return "sensing_snr_db";
    case MetricKind::Statistic: return "statistic";
    case MetricKind::Decision: return "decision";
    case MetricKind::SensingSnrThinDb: return "sensing_snr_thin_db";
  }
  return "?";
}

double CdfCurve::quantile(double p) const {
  if (values.empty()) throw std::domain_error("quantile of an empty CDF");
  const auto it = std::lower_bound(probabilities.begin(), probabilities.end(), p - 1e-12);
  if (it == probabilities.end()) return values.back();
  return values[static_cast<std::size_t>(it - probabilities.begin())];
}

double communication_sinr(const ChannelRealization& channels, const BeamformingPlan& plan,
                          const ClusterAssignment& assignment, int k, double noise_var) {
  if (k < 0 || k >= channels.K) throw std::out_of_range("communication_sinr: UE index out of range");
  double interference = 0.0;
  double signal = 0.0;
  for (int j = 0; j < channels.K; ++j) {
    Complex coherent = 0.0;
    for (const int m : assignment.serving[static_cast<std::size_t>(j)]) {
      const double eta = plan.powers(j, m);
      if (eta > 0.0) coherent += std::sqrt(eta) * channels.ue_ap(k, m).dot(plan.comm_beam(j, m));
    }
    (j == k ? signal : interference) += std::norm(coherent);
  }
  for (const int m : assignment.tx_aps) {
    const double eta0 = plan.sense_powers[static_cast<std::size_t>(m)];
    if (eta0 > 0.0)
      interference += eta0 * std::norm(channels.ue_ap(k, m).dot(plan.sense_beams[static_cast<std::size_t>(m)]));
  }
  return signal / (interference + noise_var);
}

std::vector<double> communication_sinrs(const ChannelRealization& channels,
                                        const BeamformingPlan& plan,
                                        const ClusterAssignment& assignment, double noise_var) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(channels.K));
  for (int k = 0; k < channels.K; ++k)
    out.push_back(communication_sinr(channels, plan, assignment, k, noise_var));
  return out;
}

double rate_bps(double sinr, double bandwidth_hz) {
  if (sinr < 0.0) throw std::domain_error("rate_bps: negative SINR");
  return bandwidth_hz * std::log2(1.0 + sinr);
}

DetectionRates detection_rates(std::span<const DetectionRecord> log) {
  if (log.empty()) throw std::invalid_argument("detection_rates: empty log");
  DetectionRates r;
  long hits = 0, false_alarms = 0;
  for (const auto& rec : log) {
    if (rec.truth) {
      ++r.present;
      hits += rec.decision ? 1 : 0;
    } else {
      ++r.absent;
      false_alarms += rec.decision ? 1 : 0;
    }
  }
  if (r.present > 0) r.pd = static_cast<double>(hits) / static_cast<double>(r.present);
  if (r.absent > 0) r.pfa = static_cast<double>(false_alarms) / static_cast<double>(r.absent);
  return r;
}

namespace {

std::vector<int> cluster_membership(const ClusterAssignment& assignment) {
  std::vector<int> count(static_cast<std::size_t>(assignment.M), 0);
  for (const auto& cluster : assignment.sensing_clusters)
    for (const int m : cluster) ++count[static_cast<std::size_t>(m)];
  return count;
}

}  // namespace

FronthaulLoad fronthaul_load(const ClusterAssignment& assignment) {
  const auto membership = cluster_membership(assignment);
  FronthaulLoad load;
  for (const int m : assignment.rx_aps) load.per_rx_ap.push_back(membership[static_cast<std::size_t>(m)]);
  if (!load.per_rx_ap.empty()) {
    load.max = *std::max_element(load.per_rx_ap.begin(), load.per_rx_ap.end());
    load.mean = std::accumulate(load.per_rx_ap.begin(), load.per_rx_ap.end(), 0.0) /
                static_cast<double>(load.per_rx_ap.size());
  }
  return load;
}

ApLoad ap_load(const ClusterAssignment& assignment) {
  ApLoad load;
  long served_total = 0;
  for (const auto& s : assignment.served) {
    load.max_served_ues = std::max(load.max_served_ues, static_cast<int>(s.size()));
    served_total += static_cast<long>(s.size());
  }
  if (!assignment.tx_aps.empty())
    load.mean_served_ues = static_cast<double>(served_total) / static_cast<double>(assignment.tx_aps.size());
  const auto membership = cluster_membership(assignment);
  for (const int c : membership) load.max_cluster_membership = std::max(load.max_cluster_membership, c);
  load.max_fronthaul_scalars = fronthaul_load(assignment).max;
  return load;
}

CdfCurve empirical_cdf(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("empirical_cdf: no samples");
  std::sort(samples.begin(), samples.end());
  CdfCurve curve;
  const double n = static_cast<double>(samples.size());
  curve.probabilities.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    curve.probabilities.push_back(static_cast<double>(i + 1) / n);
  curve.values = std::move(samples);
  return curve;
}

double median(std::vector<double> samples) { return empirical_cdf(std::move(samples)).quantile(0.5); }

}  // namespace cfisac
