// SPDX-License-Identifier: Apache-2.0

#include "cfisac/sensing.hpp"

#include <Eigen/SVD>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>

namespace cfisac {

Dictionary dictionary_from_columns(CMatrix columns, int rx_ap, double rank_tol) {
  Dictionary d;
  d.rx_ap = rx_ap;
  d.columns = std::move(columns);
  const Eigen::Index n = d.columns.rows();
  const Eigen::Index c = d.columns.cols();
  if (c == 0 || d.columns.cwiseAbs().maxCoeff() == 0.0) {
    d.basis.resize(n, 0);
    d.right.resize(c, 0);
    return d;
  }
  Eigen::JacobiSVD<CMatrix> svd(d.columns, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cutoff = rank_tol * sv[0];
  Eigen::Index r = 0;
  while (r < sv.size() && sv[r] > cutoff) ++r;
  d.rank = static_cast<int>(r);
  d.basis = svd.matrixU().leftCols(r);
  d.right = svd.matrixV().leftCols(r);
  d.singular_values = sv.head(r);
  return d;
}

Dictionary build_dictionary(const ReflectorGeometry& cell, int rx_ap, std::span<const int> tx_aps,
                            const std::vector<CVector>& transmit) {
  if (tx_aps.empty()) throw std::invalid_argument("build_dictionary: empty transmit cluster");
  const auto rx = static_cast<std::size_t>(rx_ap);
  const CVector& a_rx = cell.steering[rx];
  CMatrix D(a_rx.size(), static_cast<Eigen::Index>(tx_aps.size()));
  for (std::size_t i = 0; i < tx_aps.size(); ++i) {
    const auto tx = static_cast<std::size_t>(tx_aps[i]);
    const Complex illumination = cell.steering[tx].dot(transmit[tx]);  // a_tx^H s
    const double amp = std::sqrt(cell.one_way_gain[rx] * cell.one_way_gain[tx]);
    D.col(static_cast<Eigen::Index>(i)) = (amp * illumination) * a_rx;
  }
  return dictionary_from_columns(std::move(D), rx_ap);
}

double glrt_statistic(std::span<const Dictionary> dicts, std::span<const CVector> observables) {
  if (dicts.size() != observables.size())
    throw std::domain_error("glrt_statistic: one observable per receive AP required");
  double stat = 0.0;
  for (std::size_t i = 0; i < dicts.size(); ++i) {
    if (dicts[i].basis.rows() != observables[i].size())
      throw std::domain_error("glrt_statistic: observable dimension does not match dictionary");
    if (dicts[i].rank == 0) continue;
    stat += (dicts[i].basis.adjoint() * observables[i]).squaredNorm();
  }
  return stat;
}

CVector ml_alpha_estimate(const Dictionary& dict, const CVector& observable) {
  if (dict.columns.rows() != observable.size())
    throw std::domain_error("ml_alpha_estimate: observable dimension does not match dictionary");
  if (dict.rank == 0) return CVector::Zero(dict.columns.cols());
  // V Sigma^-1 U^H y
  const CVector projected = dict.basis.adjoint() * observable;
  return dict.right * (projected.array() / dict.singular_values.array().cast<Complex>()).matrix();
}

double calibrate_threshold(int total_rank, double noise_var, double target_pfa) {
  if (!(target_pfa > 0.0 && target_pfa < 1.0))
    throw std::domain_error("calibrate_threshold: target_pfa must lie in (0, 1)");
  if (total_rank < 1) throw std::domain_error("calibrate_threshold: rank must be at least 1");
  return noise_var * boost::math::gamma_q_inv(static_cast<double>(total_rank), target_pfa);
}

double calibrate_threshold_monte_carlo(int total_rank, double noise_var, double target_pfa,
                                       long trials, RandomStream& rng) {
  if (!(target_pfa > 0.0 && target_pfa < 1.0))
    throw std::domain_error("calibrate_threshold_monte_carlo: target_pfa must lie in (0, 1)");
  if (total_rank < 1 || trials < 1)
    throw std::domain_error("calibrate_threshold_monte_carlo: rank and trials must be positive");
  std::vector<double> stats(static_cast<std::size_t>(trials));
  for (auto& s : stats) {
    double acc = 0.0;
    for (int i = 0; i < total_rank; ++i) acc += std::norm(rng.complex_gaussian());
    s = noise_var * acc;
  }
  const auto idx = static_cast<std::size_t>(
      std::clamp<double>(std::ceil((1.0 - target_pfa) * static_cast<double>(trials)) - 1.0, 0.0,
                         static_cast<double>(trials - 1)));
  std::nth_element(stats.begin(), stats.begin() + static_cast<std::ptrdiff_t>(idx), stats.end());
  return stats[idx];
}

namespace {

double projected_echo_power(std::span<const Dictionary> dicts,
                            std::span<const Eigen::MatrixXd> rcs_cov) {
  if (dicts.size() != rcs_cov.size())
    throw std::domain_error("sensing_snr: one covariance per receive AP required");
  double num = 0.0;
  for (std::size_t i = 0; i < dicts.size(); ++i) {
    const CMatrix gram = dicts[i].columns.adjoint() * dicts[i].columns;
    if (gram.rows() != rcs_cov[i].rows() || gram.cols() != rcs_cov[i].cols())
      throw std::domain_error("sensing_snr: covariance dimension does not match dictionary");
    // trace(A R) = sum_ij A_ij R_ji; R is real symmetric.
    num += (gram.array() * rcs_cov[i].array().cast<Complex>()).sum().real();
  }
  return num;
}

}  // namespace

double sensing_snr(std::span<const Dictionary> dicts, std::span<const Eigen::MatrixXd> rcs_cov,
                   double noise_var) {
  if (dicts.empty()) return 0.0;
  const double num = projected_echo_power(dicts, rcs_cov);
  const double N = static_cast<double>(dicts.front().columns.rows());
  return num / (static_cast<double>(dicts.size()) * N * noise_var);
}

double sensing_snr_thin(std::span<const Dictionary> dicts,
                        std::span<const Eigen::MatrixXd> rcs_cov, double noise_var) {
  const double num = projected_echo_power(dicts, rcs_cov);
  int rank = 0;
  for (const auto& d : dicts) rank += d.rank;
  return rank == 0 ? 0.0 : num / (rank * noise_var);
}

DetectionOutcome inspect_cell(std::span<const Dictionary> dicts, std::span<const CVector> observables,
                              std::span<const Eigen::MatrixXd> rcs_cov, double noise_var,
                              double target_pfa) {
  DetectionOutcome out;
  out.statistic = glrt_statistic(dicts, observables);
  for (std::size_t i = 0; i < dicts.size(); ++i) {
    out.rank += dicts[i].rank;
    out.alpha_hat.push_back(ml_alpha_estimate(dicts[i], observables[i]));
  }
  if (out.rank > 0) {
    out.threshold = calibrate_threshold(out.rank, noise_var, target_pfa);
    out.decision = detect(out.statistic, out.threshold);
  }
  out.sensing_snr = sensing_snr(dicts, rcs_cov, noise_var);
  return out;
}

CVector simulate_rx_observable(const ObservableInputs& in, RandomStream& noise_rng) {
  const auto& transmit = *in.transmit;
  const Eigen::Index N = in.n_antennas;
  CVector y = CVector::Zero(N);
  const auto rx = static_cast<std::size_t>(in.rx_ap);

  for (const auto& echo : in.echoes) {
    const auto& g = *echo.geometry;
    Complex gain = 0.0;
    for (std::size_t i = 0; i < in.tx_aps.size(); ++i) {
      const auto tx = static_cast<std::size_t>(in.tx_aps[i]);
      const double amp = std::sqrt(g.one_way_gain[rx] * g.one_way_gain[tx]);
      gain += echo.alpha[static_cast<Eigen::Index>(i)] * amp * g.steering[tx].dot(transmit[tx]);
    }
    y += gain * g.steering[rx];
  }

  if (in.direct_scale != 0.0 && in.direct != nullptr) {
    for (const int tx : in.tx_aps)
      y += in.direct_scale * (in.direct->get(tx, in.rx_ap) * transmit[static_cast<std::size_t>(tx)]);
  }

  if (in.noise_var > 0.0) {
    const double amp = std::sqrt(in.noise_var);
    for (Eigen::Index i = 0; i < N; ++i) y[i] += amp * noise_rng.complex_gaussian();
  }
  return y;
}

}  // namespace cfisac
