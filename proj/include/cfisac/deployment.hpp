// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cfisac/config.hpp"
#include "cfisac/random.hpp"
#include "cfisac/types.hpp"

#include <vector>

namespace cfisac {

/// Axis-aligned horizontal rectangle [x0, x1) x [y0, y1).
struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool contains(double x, double y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
  Position3D center(double z) const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1), z}; }
};

/// Smallest scanned resolution element; its center is the hypothesized target position.
struct RangeCell {
  Position3D center;
  Rect footprint;
  double inspection_height = 0.0;
};

struct SensingRegion {
  int index = 0;
  Rect bounds;
  std::vector<RangeCell> cells;
};

struct Target {
  Position3D position;
  int region = 0;
};

struct NetworkLayout {
  std::vector<Position3D> aps;
  std::vector<Position3D> ues;
  std::vector<Target> targets;
  std::vector<double> ap_broadside;  // radians, one per AP
  double area_side = 0.0;
  std::vector<SensingRegion> regions;
};

/// epochs[n][l] = index of the cell of region l scanned at epoch n.
struct ScanSchedule {
  std::vector<std::vector<int>> epochs;

  std::size_t sweep_length() const { return epochs.size(); }
  int cell_at(std::size_t epoch, int region) const {
    return epochs[epoch % epochs.size()][static_cast<std::size_t>(region)];
  }
};

struct Angles {
  double azimuth = 0.0;
  double elevation = 0.0;
};

/// Factorization L = rows * cols with rows the largest divisor not above sqrt(L).
std::pair<int, int> region_grid(int L);

/// Tiles the square area into L equal rectangles, row-major with row 0 at low y.
std::vector<SensingRegion> build_regions(double area_side, int L, double cell_extent,
                                         double inspection_height);

std::vector<RangeCell> build_range_cell_grid(const SensingRegion& region, double cell_extent,
                                             double inspection_height);

NetworkLayout generate_layout(const ExperimentConfig& config, RandomStream& rng);

/// Index of the region whose bounds contain (x, y); points on the far border go to the last region.
int region_of(const std::vector<SensingRegion>& regions, double x, double y);

/// One epoch of greedy max-min selection. Regions are visited round-robin starting at
/// start_region; the first one takes first_cell, every later one takes its unscanned cell
/// maximizing the minimum distance to cells already picked in this epoch. Marks picks in
/// `scanned`; regions with no unscanned cell left repeat their last cell.
std::vector<int> greedy_epoch(const std::vector<SensingRegion>& regions,
                              std::vector<std::vector<bool>>& scanned, int start_region,
                              int first_cell);

ScanSchedule build_scan_schedule(const std::vector<SensingRegion>& regions, RandomStream& rng);

/// Azimuth atan2(dy, dx) in the global frame and elevation atan2(dz, horizontal distance).
/// Throws std::domain_error for coincident positions.
Angles angles_from(const Position3D& array_pos, const Position3D& target_pos);

}  // namespace cfisac
