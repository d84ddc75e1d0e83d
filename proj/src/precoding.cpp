// SPDX-License-Identifier: Apache-2.0

#include "cfisac/precoding.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <numeric>

namespace cfisac {

double BeamformingPlan::total_power(int m) const {
  return sense_powers[static_cast<std::size_t>(m)] + powers.col(m).sum();
}

CVector mf_comm_beam(const CVector& h) {
  const double n = h.norm();
  if (!(n > 0.0)) throw std::domain_error("mf_comm_beam: zero channel");
  return h / n;
}

CVector mf_sense_beam(const ArrayGeometry& geom, const Position3D& cell_center,
                      const Position3D& ap_position) {
  const CVector a = steering_vector(geom, angles_from(ap_position, cell_center));
  return a / std::sqrt(static_cast<double>(geom.n_antennas));
}

ZfBeam zf_sense_beam(const ArrayGeometry& geom, const Position3D& cell_center,
                     const Position3D& ap_position, std::span<const CVector> ue_channels,
                     std::span<const double> ue_gains, int k_zf) {
  const int N = geom.n_antennas;
  const int available = static_cast<int>(ue_channels.size());
  if (k_zf < 0 || k_zf > std::min(N - 1, available))
    throw std::invalid_argument("zf_sense_beam: k_zf must not exceed min(N - 1, served UEs)");
  if (ue_gains.size() != ue_channels.size())
    throw std::invalid_argument("zf_sense_beam: one gain per channel required");

  ZfBeam out;
  out.beam = mf_sense_beam(geom, cell_center, ap_position);
  if (k_zf == 0) return out;

  std::vector<int> order(ue_channels.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return ue_gains[static_cast<std::size_t>(a)] > ue_gains[static_cast<std::size_t>(b)];
  });
  out.annulled.assign(order.begin(), order.begin() + k_zf);

  CMatrix H(N, k_zf);
  for (int i = 0; i < k_zf; ++i) {
    const auto& h = ue_channels[static_cast<std::size_t>(out.annulled[static_cast<std::size_t>(i)])];
    H.col(i) = h / h.norm();
  }
  Eigen::ColPivHouseholderQR<CMatrix> qr(H);
  const Eigen::Index r = qr.rank();
  const CMatrix Q = CMatrix(qr.householderQ()).leftCols(r);

  CVector projected = out.beam - Q * (Q.adjoint() * out.beam);
  // Second pass removes the rounding residue of the first projection.
  projected -= Q * (Q.adjoint() * projected);
  const double norm = projected.norm();
  if (norm < 1e-6) {
    out.fallback = true;
    return out;
  }
  out.beam = projected / norm;
  return out;
}

PowerSplit allocate_power(double P_m, int n_served, bool sensing_active, double sensing_share) {
  if (!(P_m > 0.0)) throw std::invalid_argument("allocate_power: P_m must be positive");
  if (n_served < 0) throw std::invalid_argument("allocate_power: negative UE count");
  PowerSplit split;
  if (n_served == 0 && !sensing_active) return split;
  if (!sensing_active) {
    split.per_ue = P_m / n_served;
    return split;
  }
  if (n_served == 0) {
    split.sensing = P_m;
    return split;
  }
  if (sensing_share >= 0.0) {
    split.sensing = sensing_share * P_m;
    split.per_ue = (P_m - split.sensing) / n_served;
    return split;
  }
  split.per_ue = P_m / (n_served + 1);
  split.sensing = P_m - n_served * split.per_ue;
  return split;
}

BeamformingPlan build_plan(const ChannelRealization& channels, const Eigen::MatrixXd& large_scale,
                           const ClusterAssignment& assignment, const NetworkLayout& layout,
                           const std::vector<ArrayGeometry>& geoms,
                           const std::vector<Position3D>& cell_centers,
                           const ExperimentConfig& config, PlanDiagnostics* diagnostics) {
  BeamformingPlan plan;
  plan.K = channels.K;
  plan.M = channels.M;
  plan.N = config.N;
  plan.P_m = config.P_m;
  plan.comm_beams.resize(static_cast<std::size_t>(plan.K) * static_cast<std::size_t>(plan.M));
  plan.powers = Eigen::MatrixXd::Zero(plan.K, plan.M);
  plan.sense_beams.resize(static_cast<std::size_t>(plan.M));
  plan.sense_powers.assign(static_cast<std::size_t>(plan.M), 0.0);

  for (const int m : assignment.tx_aps) {
    const auto& served = assignment.served[static_cast<std::size_t>(m)];
    const int region = assignment.beam_region[static_cast<std::size_t>(m)];
    const bool sensing = region >= 0;
    const auto split =
        allocate_power(config.P_m, static_cast<int>(served.size()), sensing, config.sensing_share);

    for (const int k : served) {
      plan.comm_beams[static_cast<std::size_t>(k) * static_cast<std::size_t>(plan.M) +
                      static_cast<std::size_t>(m)] = mf_comm_beam(channels.ue_ap(k, m));
      plan.powers(k, m) = split.per_ue;
    }
    if (!sensing) continue;

    const auto& geom = geoms[static_cast<std::size_t>(m)];
    const auto& ap = layout.aps[static_cast<std::size_t>(m)];
    const auto& center = cell_centers[static_cast<std::size_t>(region)];
    plan.sense_powers[static_cast<std::size_t>(m)] = split.sensing;

    if (config.beamformer == SensingBeamformer::MF) {
      plan.sense_beams[static_cast<std::size_t>(m)] = mf_sense_beam(geom, center, ap);
      continue;
    }
    std::vector<CVector> ue_channels;
    std::vector<double> gains;
    for (const int k : served) {
      ue_channels.push_back(channels.ue_ap(k, m));
      gains.push_back(large_scale(k, m));
    }
    const int k_zf = std::min({config.k_zf, geom.n_antennas - 1, static_cast<int>(served.size())});
    auto zf = zf_sense_beam(geom, center, ap, ue_channels, gains, k_zf);
    if (diagnostics) {
      ++diagnostics->zf_beams;
      if (zf.fallback) {
        ++diagnostics->zf_fallbacks;
      } else {
        for (const int i : zf.annulled) {
          const auto& h = ue_channels[static_cast<std::size_t>(i)];
          const double leak = std::abs(h.dot(zf.beam)) / h.norm();
          diagnostics->max_normalized_leakage = std::max(diagnostics->max_normalized_leakage, leak);
          ++diagnostics->annulled_links;
        }
      }
    }
    plan.sense_beams[static_cast<std::size_t>(m)] = std::move(zf.beam);
  }
  return plan;
}

CVector transmit_vector(const BeamformingPlan& plan, int m, std::span<const Complex> data_symbols,
                        std::span<const Complex> sense_symbols) {
  const auto& sense = plan.sense_beams[static_cast<std::size_t>(m)];
  CVector s = CVector::Zero(plan.N);
  for (int k = 0; k < plan.K; ++k) {
    const double eta = plan.powers(k, m);
    if (eta > 0.0) s += (std::sqrt(eta) * data_symbols[static_cast<std::size_t>(k)]) * plan.comm_beam(k, m);
  }
  const double eta0 = plan.sense_powers[static_cast<std::size_t>(m)];
  if (eta0 > 0.0) s += (std::sqrt(eta0) * sense_symbols[static_cast<std::size_t>(m)]) * sense;
  return s;
}

}  // namespace cfisac
