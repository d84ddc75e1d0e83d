// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace cfisac {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 3.0e8;

/// Invalid or inconsistent experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Broken numerical invariant inside the simulator.
class InternalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Position3D {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Position3D&, const Position3D&) = default;
};

inline double distance(const Position3D& a, const Position3D& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline double horizontal_distance(const Position3D& a, const Position3D& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

enum class ScalabilityMode { UTC, UC, TC, CF };
enum class SensingBeamformer { MF, ZF };

std::string to_string(ScalabilityMode mode);
std::string to_string(SensingBeamformer bf);
ScalabilityMode parse_mode(const std::string& text);
SensingBeamformer parse_beamformer(const std::string& text);

/// Modes in which each UE is served by its strongest few APs only.
inline bool user_centric(ScalabilityMode mode) {
  return mode == ScalabilityMode::UTC || mode == ScalabilityMode::UC;
}
/// Modes in which each region is sensed by a nearby AP subset only.
inline bool target_centric(ScalabilityMode mode) {
  return mode == ScalabilityMode::UTC || mode == ScalabilityMode::TC;
}

}  // namespace cfisac
