// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <boost/random/normal_distribution.hpp>

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace cfisac {

/// Mixes a master seed with a list of tags into an independent 64-bit stream seed.
/// Used to give every (drop, realization, entity) its own stream so that results
/// do not depend on evaluation order or on which arm of an experiment is running.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags);

/// Stream tags. Keep values stable: they are part of the reproducibility contract.
enum class StreamTag : std::uint64_t {
  Layout = 0x4c41594f,
  Fading = 0x46414445,
  Symbols = 0x53594d42,
  Rcs = 0x52435321,
  Noise = 0x4e4f4953,
  DirectPath = 0x44495250,
  Schedule = 0x53434844,
  Calibration = 0x43414c49,
};

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
  RandomStream(std::uint64_t master, std::initializer_list<std::uint64_t> tags)
      : engine_(derive_seed(master, tags)) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }
  double gaussian() { return normal_(engine_); }
  /// CN(0, 1): real and imaginary parts each N(0, 1/2).
  std::complex<double> complex_gaussian() {
    constexpr double kHalf = 0.70710678118654752440;
    const double re = normal_(engine_);
    const double im = normal_(engine_);
    return {kHalf * re, kHalf * im};
  }
  /// Uniform random phase on the unit circle.
  std::complex<double> unit_phase() { return std::polar(1.0, uniform(-kPi, kPi)); }

  std::mt19937_64& engine() { return engine_; }

  static constexpr double kPi = 3.14159265358979323846;

 private:
  std::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_{0.0, 1.0};  // ziggurat
};

inline std::uint64_t tag(StreamTag t) { return static_cast<std::uint64_t>(t); }

}  // namespace cfisac
