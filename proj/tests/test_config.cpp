// SPDX-License-Identifier: Apache-2.0

#include "cfisac/config.hpp"
#include "cfisac/random.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

using namespace cfisac;

TEST_CASE("baseline defaults") {
  const ExperimentConfig c;
  CHECK(c.M == 64);
  CHECK(c.K == 32);
  CHECK(c.T == 8);
  CHECK(c.L == 4);
  CHECK(c.N == 8);
  CHECK(c.q_serving == 4);
  CHECK(c.m_tx_per_region == 6);
  CHECK(c.m_rx_per_region == 2);
  CHECK(c.P_m == 2.0);
  CHECK(c.bandwidth == 20e6);
  CHECK(c.carrier == 2e9);
  CHECK(c.noise_density_dbm_hz == -174.0);
  CHECK(c.sigma_rcs_dbsm == 10.0);
  CHECK(c.mode == ScalabilityMode::UTC);
  CHECK_NOTHROW(validate(c));
}

TEST_CASE("noise power is N0 B in watts") {
  const ExperimentConfig c;
  // -174 dBm/Hz = 1e-3 * 10^-17.4 W/Hz
  const double expected = 1e-3 * std::pow(10.0, -17.4) * 20e6;
  CHECK(c.noise_power_w() == doctest::Approx(expected).epsilon(1e-12));
  CHECK(c.sigma_rcs_linear() == doctest::Approx(10.0));
  CHECK(c.rician_k_linear() == doctest::Approx(10.0));
}

TEST_CASE("range resolution c/(2B)") {
  CHECK(range_resolution(20e6) == doctest::Approx(7.5));
  ExperimentConfig c;
  CHECK(c.effective_cell_extent() == 125.0);
  c.bandwidth_matched_cells = true;
  CHECK(c.effective_cell_extent() == doctest::Approx(7.5));
}

TEST_CASE("config text round trip") {
  ExperimentConfig c;
  c.mode = ScalabilityMode::CF;
  c.beamformer = SensingBeamformer::ZF;
  c.k_zf = 2;
  c.P_m = 0.1 + 0.2;  // not exactly representable in short decimal form
  c.seed = 18446744073709551557ull;
  c.report_thin_snr = true;
  std::istringstream in(to_text(c));
  const auto back = parse_config(in);
  CHECK(to_text(back) == to_text(c));
  CHECK(back.P_m == c.P_m);
  CHECK(back.seed == c.seed);
  CHECK(back.mode == ScalabilityMode::CF);
}

TEST_CASE("config parsing: comments, whitespace and errors") {
  std::istringstream in("# header\n  M = 128  # more APs\n\nmode=tc\nsubtract_direct=off\n");
  const auto c = parse_config(in);
  CHECK(c.M == 128);
  CHECK(c.mode == ScalabilityMode::TC);
  CHECK_FALSE(c.subtract_direct);

  ExperimentConfig d;
  CHECK_THROWS_AS(apply_setting(d, "no_such_key", "1"), ConfigError);
  CHECK_THROWS_AS(apply_setting(d, "M", "12x"), ConfigError);
  CHECK_THROWS_AS(apply_setting(d, "P_m", "watts"), ConfigError);
  CHECK_THROWS_AS(apply_setting(d, "mode", "XX"), ConfigError);
  CHECK_THROWS_AS(apply_setting(d, "subtract_direct", "maybe"), ConfigError);
  std::istringstream bad("M 64\n");
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.cfg"), ConfigError);
}

TEST_CASE("validate rejects invalid configurations") {
  auto rejects = [](auto mutate) {
    ExperimentConfig c;
    mutate(c);
    CHECK_THROWS_AS(validate(c), ConfigError);
  };
  rejects([](ExperimentConfig& c) { c.pfa_target = 0.0; });
  rejects([](ExperimentConfig& c) { c.pfa_target = 1.0; });
  rejects([](ExperimentConfig& c) { c.m_rx_per_region = 0; });
  rejects([](ExperimentConfig& c) { c.M = 31; });  // 4 regions x 8 APs
  rejects([](ExperimentConfig& c) { c.k_zf = 8; });
  rejects([](ExperimentConfig& c) { c.K = 0; });
  rejects([](ExperimentConfig& c) { c.n_drops = 0; });
  rejects([](ExperimentConfig& c) { c.cell_extent_m = 0.0; });

  ExperimentConfig cf;
  cf.mode = ScalabilityMode::CF;
  cf.M = 9;  // only receive APs are claimed per region
  CHECK_NOTHROW(validate(cf));
  ExperimentConfig h0;
  h0.T = 0;
  CHECK_NOTHROW(validate(h0));
}

TEST_CASE("derived seeds are deterministic and distinct") {
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(2, {2, 3}));
  CHECK(derive_seed(1, {2}) != derive_seed(1, {2, 0}));
  std::set<std::uint64_t> seen;
  for (std::uint64_t d = 0; d < 100; ++d)
    for (std::uint64_t f = 0; f < 100; ++f) seen.insert(derive_seed(7, {tag(StreamTag::Fading), d, f}));
  CHECK(seen.size() == 10000);
}

TEST_CASE("complex gaussian draws are CN(0,1)") {
  RandomStream rng(42);
  const int n = 200000;
  double power = 0.0, re2 = 0.0;
  Complex mean = 0.0, pseudo = 0.0;
  for (int i = 0; i < n; ++i) {
    const Complex z = rng.complex_gaussian();
    power += std::norm(z);
    re2 += z.real() * z.real();
    mean += z;
    pseudo += z * z;
  }
  CHECK(power / n == doctest::Approx(1.0).epsilon(0.01));
  CHECK(re2 / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::abs(mean / static_cast<double>(n)) < 0.01);
  CHECK(std::abs(pseudo / static_cast<double>(n)) < 0.01);  // circular symmetry

  RandomStream a(5), b(5);
  for (int i = 0; i < 10; ++i) CHECK(a.complex_gaussian() == b.complex_gaussian());
  CHECK(std::abs(std::abs(rng.unit_phase()) - 1.0) < 1e-15);
}

TEST_CASE("decimal formatting round-trips and stays short") {
  CHECK(format_double(1.65) == "1.65");
  CHECK(format_double(20e6) == "20000000");
  CHECK(format_double(0.1 + 0.2) == "0.30000000000000004");
  RandomStream rng(12);
  for (int i = 0; i < 10000; ++i) {
    const double v = std::ldexp(rng.uniform(-1.0, 1.0), static_cast<int>(rng.index(200)) - 100);
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
}
