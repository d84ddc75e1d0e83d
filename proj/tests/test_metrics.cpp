// SPDX-License-Identifier: Apache-2.0

#include "cfisac/metrics.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace cfisac;
using cfisac::test::random_vector;
using cfisac::test::rel_diff;

namespace {

struct Instance {
  ChannelRealization channels;
  BeamformingPlan plan;
  ClusterAssignment assignment;
};

/// Random small network where every AP transmits, each UE has a random nonempty serving set
/// and every AP carries a sensing beam.
Instance random_instance(RandomStream& rng, int K, int M, int N) {
  Instance in;
  in.channels.K = K;
  in.channels.M = M;
  for (int i = 0; i < K * M; ++i) in.channels.h.push_back(random_vector(N, rng));
  auto& a = in.assignment;
  a.M = M;
  a.is_rx.assign(static_cast<std::size_t>(M), false);
  for (int m = 0; m < M; ++m) a.tx_aps.push_back(m);
  a.serving.resize(static_cast<std::size_t>(K));
  a.served.resize(static_cast<std::size_t>(M));
  for (int k = 0; k < K; ++k) {
    for (int m = 0; m < M; ++m)
      if (rng.uniform(0.0, 1.0) < 0.5) a.serving[static_cast<std::size_t>(k)].push_back(m);
    if (a.serving[static_cast<std::size_t>(k)].empty())
      a.serving[static_cast<std::size_t>(k)].push_back(static_cast<int>(rng.index(static_cast<std::size_t>(M))));
    for (const int m : a.serving[static_cast<std::size_t>(k)]) a.served[static_cast<std::size_t>(m)].push_back(k);
  }
  auto& p = in.plan;
  p.K = K;
  p.M = M;
  p.N = N;
  p.comm_beams.resize(static_cast<std::size_t>(K * M));
  p.powers = Eigen::MatrixXd::Zero(K, M);
  for (int k = 0; k < K; ++k)
    for (const int m : a.serving[static_cast<std::size_t>(k)]) {
      CVector w = random_vector(N, rng);
      p.comm_beams[static_cast<std::size_t>(k * M + m)] = w / w.norm();
      p.powers(k, m) = rng.uniform(0.1, 1.0);
    }
  for (int m = 0; m < M; ++m) {
    CVector w = random_vector(N, rng);
    p.sense_beams.push_back(w / w.norm());
    p.sense_powers.push_back(rng.uniform(0.1, 1.0));
  }
  return in;
}

/// Stacked-network form: v_j is the concatenation of sqrt(eta_jm) w_jm over all APs.
double stacked_sinr(const Instance& in, int k, double noise) {
  const int K = in.channels.K, M = in.channels.M, N = in.plan.N;
  CVector hk(M * N);
  for (int m = 0; m < M; ++m) hk.segment(m * N, N) = in.channels.ue_ap(k, m);
  double signal = 0.0, interference = noise;
  for (int j = 0; j < K; ++j) {
    CVector v = CVector::Zero(M * N);
    for (const int m : in.assignment.serving[static_cast<std::size_t>(j)])
      v.segment(m * N, N) = std::sqrt(in.plan.powers(j, m)) * in.plan.comm_beam(j, m);
    const double g = std::norm(hk.dot(v));
    (j == k ? signal : interference) += g;
  }
  CVector sense = CVector::Zero(M * N);
  for (int m = 0; m < M; ++m) {
    // Sensing symbols are independent across APs: add powers, not amplitudes.
    sense.setZero();
    sense.segment(m * N, N) = std::sqrt(in.plan.sense_powers[static_cast<std::size_t>(m)]) *
                              in.plan.sense_beams[static_cast<std::size_t>(m)];
    interference += std::norm(hk.dot(sense));
  }
  return signal / interference;
}

}  // namespace

TEST_CASE("communication SINR against the stacked-network oracle") {
  RandomStream rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const int K = 1 + static_cast<int>(rng.index(4));
    const int M = 1 + static_cast<int>(rng.index(5));
    const auto in = random_instance(rng, K, M, 4);
    const double noise = std::pow(10.0, rng.uniform(-3, 1));
    const auto sinrs = communication_sinrs(in.channels, in.plan, in.assignment, noise);
    for (int k = 0; k < K; ++k) CHECK(rel_diff(sinrs[static_cast<std::size_t>(k)], stacked_sinr(in, k, noise)) < 1e-10);
  }
}

TEST_CASE("communication SINR properties") {
  RandomStream rng(2);
  SUBCASE("removing sensing interference never lowers the SINR") {
    for (int trial = 0; trial < 200; ++trial) {
      auto in = random_instance(rng, 3, 4, 4);
      const auto with = communication_sinrs(in.channels, in.plan, in.assignment, 0.1);
      std::fill(in.plan.sense_powers.begin(), in.plan.sense_powers.end(), 0.0);
      const auto without = communication_sinrs(in.channels, in.plan, in.assignment, 0.1);
      for (std::size_t k = 0; k < with.size(); ++k) CHECK(without[k] >= with[k]);
    }
  }
  SUBCASE("single UE, single AP, no sensing: |h^H w|^2 eta / noise") {
    auto in = random_instance(rng, 1, 1, 4);
    in.plan.sense_powers[0] = 0.0;
    in.assignment.serving[0] = {0};
    const double expected =
        in.plan.powers(0, 0) * std::norm(in.channels.ue_ap(0, 0).dot(in.plan.comm_beam(0, 0))) / 0.5;
    CHECK(communication_sinr(in.channels, in.plan, in.assignment, 0, 0.5) == doctest::Approx(expected).epsilon(1e-13));
  }
  SUBCASE("huge noise drives the SINR to zero") {
    const auto in = random_instance(rng, 2, 3, 4);
    CHECK(communication_sinr(in.channels, in.plan, in.assignment, 0, 1e30) < 1e-28);
  }
  SUBCASE("bad UE index") {
    const auto in = random_instance(rng, 2, 3, 4);
    CHECK_THROWS_AS(communication_sinr(in.channels, in.plan, in.assignment, 2, 1.0), std::out_of_range);
  }
}

TEST_CASE("Shannon rate") {
  CHECK(rate_bps(1.0, 20e6) == doctest::Approx(20e6));
  CHECK(rate_bps(3.0, 20e6) == doctest::Approx(40e6));
  CHECK(rate_bps(0.0, 20e6) == 0.0);
  CHECK_THROWS_AS(rate_bps(-1.0, 20e6), std::domain_error);
}

TEST_CASE("detection rates") {
  auto rec = [](bool truth, bool decision) {
    DetectionRecord r;
    r.truth = truth;
    r.decision = decision;
    return r;
  };
  const std::vector<DetectionRecord> mixed{rec(true, true), rec(true, false), rec(true, true), rec(true, true),
                                           rec(false, true), rec(false, false), rec(false, false),
                                           rec(false, false)};
  const auto r = detection_rates(mixed);
  CHECK(r.present == 4);
  CHECK(r.absent == 4);
  CHECK(*r.pd == 0.75);
  CHECK(*r.pfa == 0.25);

  const std::vector<DetectionRecord> absent_only{rec(false, false), rec(false, true)};
  const auto a = detection_rates(absent_only);
  CHECK_FALSE(a.pd.has_value());
  CHECK(*a.pfa == 0.5);

  const std::vector<DetectionRecord> present_only{rec(true, true)};
  CHECK_FALSE(detection_rates(present_only).pfa.has_value());
  CHECK_THROWS_AS(detection_rates(std::vector<DetectionRecord>{}), std::invalid_argument);
}

TEST_CASE("fronthaul and AP load") {
  SUBCASE("disjoint clusters report one scalar per receive AP") {
    ClusterAssignment a;
    a.M = 8;
    a.rx_aps = {0, 4};
    a.tx_aps = {1, 2, 3, 5, 6, 7};
    a.sensing_clusters = {{0, 1, 2, 3}, {4, 5, 6, 7}};
    a.served = {{}, {0}, {0, 1}, {1}, {}, {2}, {}, {2, 3}};
    const auto f = fronthaul_load(a);
    CHECK(f.per_rx_ap == std::vector<int>{1, 1});
    CHECK(f.max == 1);
    CHECK(f.mean == 1.0);
    const auto load = ap_load(a);
    CHECK(load.max_served_ues == 2);
    CHECK(load.max_cluster_membership == 1);
    CHECK(load.mean_served_ues == doctest::Approx(7.0 / 6.0));
  }
  SUBCASE("every AP in all four clusters") {
    ClusterAssignment a;
    a.M = 6;
    a.rx_aps = {0, 1};
    a.tx_aps = {2, 3, 4, 5};
    a.served.resize(6);
    a.sensing_clusters.assign(4, std::vector<int>{0, 1, 2, 3, 4, 5});
    CHECK(fronthaul_load(a).max == 4);
    CHECK(ap_load(a).max_cluster_membership == 4);
  }
  SUBCASE("UTC drops keep one scalar per receive AP as M grows") {
    for (const int M : {64, 128}) {
      ExperimentConfig config;
      config.M = M;
      config.K = M / 2;
      config.L = M / 16;
      RandomStream rng(static_cast<std::uint64_t>(M));
      const auto layout = generate_layout(config, rng);
      const auto ls = draw_large_scale(layout, config, rng);
      const auto a = build_assignment(layout, ls, config);
      CHECK(fronthaul_load(a).max == 1);
      CHECK(ap_load(a).max_cluster_membership == 1);
    }
  }
}

TEST_CASE("empirical CDF and median") {
  const auto cdf = empirical_cdf({3.0, 1.0, 2.0, 4.0});
  CHECK(cdf.values == std::vector<double>{1.0, 2.0, 3.0, 4.0});
  CHECK(cdf.probabilities == std::vector<double>{0.25, 0.5, 0.75, 1.0});
  CHECK(cdf.quantile(0.5) == 2.0);
  CHECK(cdf.quantile(0.51) == 3.0);
  CHECK(cdf.quantile(1.0) == 4.0);
  CHECK(median({5.0, 1.0, 3.0}) == 3.0);
  CHECK(median({7.0}) == 7.0);
  CHECK_THROWS_AS(empirical_cdf({}), std::invalid_argument);

  // Pooling batches equals building the CDF over the concatenation.
  RandomStream rng(3);
  std::vector<double> a, b;
  for (int i = 0; i < 50; ++i) a.push_back(rng.uniform(0, 1));
  for (int i = 0; i < 70; ++i) b.push_back(rng.uniform(0, 1));
  std::vector<double> all = a;
  all.insert(all.end(), b.begin(), b.end());
  const auto pooled = empirical_cdf(all);
  CHECK(pooled.values.size() == 120);
  for (std::size_t i = 1; i < pooled.values.size(); ++i) CHECK(pooled.values[i - 1] <= pooled.values[i]);
  std::sort(all.begin(), all.end());
  CHECK(pooled.values == all);
}

TEST_CASE("metric names") {
  CHECK(to_string(MetricKind::RateBps) == "rate_bps");
  CHECK(to_string(MetricKind::SensingSnrDb) == "sensing_snr_db");
}
