// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cfisac/config.hpp"
#include "cfisac/random.hpp"
#include "cfisac/types.hpp"

#include <cmath>

namespace cfisac::test {

inline CMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, RandomStream& rng) {
  CMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.complex_gaussian();
  return m;
}

inline CVector random_vector(Eigen::Index n, RandomStream& rng) { return random_matrix(n, 1, rng).col(0); }

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

/// Small config that runs in milliseconds.
inline ExperimentConfig tiny_config() {
  ExperimentConfig c;
  c.n_drops = 2;
  c.n_fading = 3;
  c.threads = 1;
  return c;
}

}  // namespace cfisac::test
