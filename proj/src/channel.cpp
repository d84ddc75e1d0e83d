// SPDX-License-Identifier: Apache-2.0

#include "cfisac/channel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace cfisac {

double pathloss_db(double distance_3d, LinkKind link, double carrier_hz) {
  const double d = std::max(distance_3d, 1.0);
  const double f_ghz = carrier_hz / 1e9;
  switch (link) {
    case LinkKind::UeApNlos:
      return 36.7 * std::log10(d) + 22.7 + 26.0 * std::log10(f_ghz);
    case LinkKind::ApApLos:
    case LinkKind::ApTargetLos:
      return 22.0 * std::log10(d) + 28.0 + 20.0 * std::log10(f_ghz);
  }
  throw std::domain_error("pathloss_db: unknown link kind");
}

CVector steering_vector(const ArrayGeometry& geom, double azimuth, double elevation) {
  const double phase_step = 2.0 * kPi * geom.spacing_wavelengths *
                            std::sin(azimuth - geom.broadside_azimuth) * std::cos(elevation);
  CVector a(geom.n_antennas);
  for (int i = 0; i < geom.n_antennas; ++i) a[i] = std::polar(1.0, phase_step * i);
  return a;
}

CVector steering_vector(const ArrayGeometry& geom, const Angles& angles) {
  return steering_vector(geom, angles.azimuth, angles.elevation);
}

CVector draw_ue_ap_channel(double large_scale, const ArrayGeometry& geom, RandomStream& rng) {
  const double amp = std::sqrt(large_scale);
  CVector h(geom.n_antennas);
  for (int i = 0; i < geom.n_antennas; ++i) h[i] = amp * rng.complex_gaussian();
  return h;
}

CMatrix draw_ap_ap_channel(double large_scale, const CVector& rx_steering,
                           const CVector& tx_steering, double rician_k, RandomStream& rng) {
  if (rician_k < 0.0) throw std::domain_error("draw_ap_ap_channel: negative Rician factor");
  const double amp = std::sqrt(large_scale);
  const Eigen::Index nr = rx_steering.size();
  const Eigen::Index nt = tx_steering.size();
  if (std::isinf(rician_k)) return amp * rx_steering * tx_steering.adjoint();

  const double los = std::sqrt(rician_k / (rician_k + 1.0));
  const double nlos = std::sqrt(1.0 / (rician_k + 1.0));
  CMatrix G = los * rx_steering * tx_steering.adjoint();
  // Column-major fill keeps the draw order fixed.
  for (Eigen::Index c = 0; c < nt; ++c)
    for (Eigen::Index r = 0; r < nr; ++r) G(r, c) += nlos * rng.complex_gaussian();
  return amp * G;
}

CMatrix draw_ap_ap_channel(double large_scale, const ArrayGeometry& tx_geom,
                           const Position3D& tx_pos, const ArrayGeometry& rx_geom,
                           const Position3D& rx_pos, double rician_k, RandomStream& rng) {
  const CVector a_rx = steering_vector(rx_geom, angles_from(rx_pos, tx_pos));
  const CVector a_tx = steering_vector(tx_geom, angles_from(tx_pos, rx_pos));
  return draw_ap_ap_channel(large_scale, a_rx, a_tx, rician_k, rng);
}

double view_angle(const Position3D& target, const Position3D& a, const Position3D& b) {
  const Eigen::Vector3d ua(a.x - target.x, a.y - target.y, a.z - target.z);
  const Eigen::Vector3d ub(b.x - target.x, b.y - target.y, b.z - target.z);
  const double na = ua.norm(), nb = ub.norm();
  if (na == 0.0 || nb == 0.0) throw std::domain_error("view_angle: AP coincides with target");
  // atan2 form stays accurate for nearly parallel directions.
  return std::atan2(ua.cross(ub).norm(), ua.dot(ub));
}

Eigen::MatrixXd rcs_angle_kernel(const Position3D& target, const std::vector<Position3D>& aps,
                                 double angular_corr_std) {
  const auto n = static_cast<Eigen::Index>(aps.size());
  Eigen::MatrixXd K(n, n);
  const double denom = 2.0 * angular_corr_std * angular_corr_std;
  for (Eigen::Index i = 0; i < n; ++i) {
    K(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double psi = view_angle(target, aps[static_cast<std::size_t>(i)],
                                    aps[static_cast<std::size_t>(j)]);
      K(i, j) = K(j, i) = std::exp(-psi * psi / denom);
    }
  }
  return K;
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& covariance) {
  if (covariance.size() == 0) return covariance;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance);
  if (eig.info() != Eigen::Success) throw InternalError("psd_sqrt: eigendecomposition failed");
  Eigen::VectorXd ev = eig.eigenvalues();
  const double scale = std::max(ev.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < -1e-8 * scale) throw InternalError("psd_sqrt: covariance is not positive semidefinite");
    ev[i] = std::sqrt(std::max(ev[i], 0.0));
  }
  return eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
}

CMatrix RcsFactors::draw(RandomStream& rng) const {
  const Eigen::Index nr = rx_sqrt.rows();
  const Eigen::Index nt = tx_sqrt.rows();
  CMatrix W(nr, nt);
  for (Eigen::Index c = 0; c < nt; ++c)
    for (Eigen::Index r = 0; r < nr; ++r) W(r, c) = rng.complex_gaussian();
  return std::sqrt(variance) * (rx_sqrt.cast<Complex>() * W * tx_sqrt.transpose().cast<Complex>());
}

RcsFactors rcs_factors(const Position3D& target, const std::vector<Position3D>& tx_aps,
                       const std::vector<Position3D>& rx_aps, const RcsModel& model) {
  if (tx_aps.empty() || rx_aps.empty()) throw std::invalid_argument("rcs_factors: empty AP set");
  if (!(model.variance > 0.0) || !(model.angular_corr_std > 0.0))
    throw std::invalid_argument("rcs_factors: variance and kernel width must be positive");
  RcsFactors f;
  f.variance = model.variance;
  f.rx_sqrt = psd_sqrt(rcs_angle_kernel(target, rx_aps, model.angular_corr_std));
  f.tx_sqrt = psd_sqrt(rcs_angle_kernel(target, tx_aps, model.angular_corr_std));
  return f;
}

CMatrix draw_correlated_rcs(const Position3D& target, const std::vector<Position3D>& tx_aps,
                            const std::vector<Position3D>& rx_aps, const RcsModel& model,
                            RandomStream& rng) {
  return rcs_factors(target, tx_aps, rx_aps, model).draw(rng);
}

Eigen::MatrixXd rcs_tx_covariance(const Position3D& target, const std::vector<Position3D>& tx_aps,
                                  const RcsModel& model) {
  return model.variance * rcs_angle_kernel(target, tx_aps, model.angular_corr_std);
}

CMatrix composite_target_channel(const TargetLink& link) {
  return (link.alpha * std::sqrt(link.beta)) * link.rx_steering * link.tx_steering.adjoint();
}

ReflectorGeometry reflector_geometry(const Position3D& position,
                                     const std::vector<Position3D>& aps,
                                     const std::vector<ArrayGeometry>& geoms,
                                     double carrier_hz) {
  ReflectorGeometry g;
  g.position = position;
  g.one_way_gain.reserve(aps.size());
  g.steering.reserve(aps.size());
  for (std::size_t m = 0; m < aps.size(); ++m) {
    g.one_way_gain.push_back(
        db_to_linear(-pathloss_db(distance(aps[m], position), LinkKind::ApTargetLos, carrier_hz)));
    g.steering.push_back(steering_vector(geoms[m], angles_from(aps[m], position)));
  }
  return g;
}

std::vector<ArrayGeometry> ap_arrays(const NetworkLayout& layout, const ExperimentConfig& config) {
  std::vector<ArrayGeometry> geoms;
  geoms.reserve(layout.aps.size());
  for (std::size_t m = 0; m < layout.aps.size(); ++m)
    geoms.push_back({config.N, config.antenna_spacing,
                     m < layout.ap_broadside.size() ? layout.ap_broadside[m] : 0.0});
  return geoms;
}

Eigen::MatrixXd draw_large_scale(const NetworkLayout& layout, const ExperimentConfig& config,
                                 RandomStream& rng) {
  const auto K = static_cast<Eigen::Index>(layout.ues.size());
  const auto M = static_cast<Eigen::Index>(layout.aps.size());
  Eigen::MatrixXd gains(K, M);
  for (Eigen::Index k = 0; k < K; ++k) {
    for (Eigen::Index m = 0; m < M; ++m) {
      const double d = distance(layout.ues[static_cast<std::size_t>(k)],
                                layout.aps[static_cast<std::size_t>(m)]);
      double loss = pathloss_db(d, LinkKind::UeApNlos, config.carrier);
      if (config.shadowing_std_db > 0.0) loss += config.shadowing_std_db * rng.gaussian();
      gains(k, m) = db_to_linear(-loss);
    }
  }
  return gains;
}

const CMatrix& DirectPaths::get(int tx, int rx) const {
  const auto key = std::make_pair(tx, rx);
  if (const auto it = cache_.find(key); it != cache_.end()) return it->second;
  const auto& ptx = layout_->aps[static_cast<std::size_t>(tx)];
  const auto& prx = layout_->aps[static_cast<std::size_t>(rx)];
  const double ls = db_to_linear(-pathloss_db(distance(ptx, prx), LinkKind::ApApLos, carrier_));
  RandomStream rng(seed_, {tag(StreamTag::DirectPath), static_cast<std::uint64_t>(tx),
                           static_cast<std::uint64_t>(rx)});
  auto G = draw_ap_ap_channel(ls, (*geoms_)[static_cast<std::size_t>(tx)], ptx,
                              (*geoms_)[static_cast<std::size_t>(rx)], prx, rician_k_, rng);
  return cache_.emplace(key, std::move(G)).first->second;
}

ChannelRealization draw_ue_ap_channels(const Eigen::MatrixXd& large_scale,
                                       const std::vector<ArrayGeometry>& geoms, RandomStream& rng) {
  ChannelRealization ch;
  ch.K = static_cast<int>(large_scale.rows());
  ch.M = static_cast<int>(large_scale.cols());
  ch.h.reserve(static_cast<std::size_t>(ch.K) * static_cast<std::size_t>(ch.M));
  for (int k = 0; k < ch.K; ++k)
    for (int m = 0; m < ch.M; ++m)
      ch.h.push_back(draw_ue_ap_channel(large_scale(k, m), geoms[static_cast<std::size_t>(m)], rng));
  return ch;
}

}  // namespace cfisac
