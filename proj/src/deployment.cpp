// SPDX-License-Identifier: Apache-2.0

#include "cfisac/deployment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cfisac {

std::pair<int, int> region_grid(int L) {
  if (L <= 0) throw ConfigError("number of regions must be positive");
  int rows = static_cast<int>(std::floor(std::sqrt(static_cast<double>(L))));
  while (L % rows != 0) --rows;
  return {rows, L / rows};
}

std::vector<RangeCell> build_range_cell_grid(const SensingRegion& region, double cell_extent,
                                             double inspection_height) {
  if (!(cell_extent > 0.0)) throw ConfigError("cell extent must be positive");
  const Rect& b = region.bounds;
  // Relative slack keeps exact divisions (500 / 125) from producing a sliver cell.
  const auto count = [&](double side) {
    return std::max(1, static_cast<int>(std::ceil(side / cell_extent - 1e-9)));
  };
  const int nx = count(b.width());
  const int ny = count(b.height());

  std::vector<RangeCell> cells;
  cells.reserve(static_cast<std::size_t>(nx * ny));
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      Rect f{b.x0 + ix * cell_extent, b.y0 + iy * cell_extent,
             std::min(b.x1, b.x0 + (ix + 1) * cell_extent),
             std::min(b.y1, b.y0 + (iy + 1) * cell_extent)};
      if (ix == nx - 1) f.x1 = b.x1;
      if (iy == ny - 1) f.y1 = b.y1;
      cells.push_back({f.center(inspection_height), f, inspection_height});
    }
  }
  return cells;
}

std::vector<SensingRegion> build_regions(double area_side, int L, double cell_extent,
                                         double inspection_height) {
  const auto [rows, cols] = region_grid(L);
  const double w = area_side / cols;
  const double h = area_side / rows;
  std::vector<SensingRegion> regions;
  regions.reserve(static_cast<std::size_t>(L));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      SensingRegion region;
      region.index = r * cols + c;
      region.bounds = {c * w, r * h, c == cols - 1 ? area_side : (c + 1) * w,
                       r == rows - 1 ? area_side : (r + 1) * h};
      region.cells = build_range_cell_grid(region, cell_extent, inspection_height);
      regions.push_back(std::move(region));
    }
  }
  return regions;
}

int region_of(const std::vector<SensingRegion>& regions, double x, double y) {
  for (const auto& r : regions)
    if (r.bounds.contains(x, y)) return r.index;
  // Points on the outer upper border: pick the nearest region center.
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& r : regions) {
    const auto c = r.bounds.center(0.0);
    const double d = std::hypot(c.x - x, c.y - y);
    if (d < best_d) {
      best_d = d;
      best = r.index;
    }
  }
  return best;
}

NetworkLayout generate_layout(const ExperimentConfig& config, RandomStream& rng) {
  if (config.M <= 0 || config.K <= 0 || config.T < 0 || config.L <= 0)
    throw ConfigError("layout needs positive M, K, L and nonnegative T");

  NetworkLayout layout;
  layout.area_side = config.area_side_m;
  layout.regions = build_regions(config.area_side_m, config.L, config.effective_cell_extent(),
                                 config.inspection_height_m);

  const double side = config.area_side_m;
  layout.aps.reserve(static_cast<std::size_t>(config.M));
  for (int m = 0; m < config.M; ++m)
    layout.aps.push_back({rng.uniform(0.0, side), rng.uniform(0.0, side), config.ap_height_m});
  layout.ues.reserve(static_cast<std::size_t>(config.K));
  for (int k = 0; k < config.K; ++k)
    layout.ues.push_back({rng.uniform(0.0, side), rng.uniform(0.0, side), config.ue_height_m});

  // Round-robin over regions splits targets as evenly as possible.
  layout.targets.reserve(static_cast<std::size_t>(config.T));
  for (int t = 0; t < config.T; ++t) {
    const auto& region = layout.regions[static_cast<std::size_t>(t % config.L)];
    const Rect& b = region.bounds;
    Target target;
    target.region = region.index;
    target.position = {rng.uniform(b.x0, b.x1), rng.uniform(b.y0, b.y1),
                       rng.uniform(config.target_height_min_m, config.target_height_max_m)};
    layout.targets.push_back(target);
  }

  layout.ap_broadside.assign(static_cast<std::size_t>(config.M), 0.0);
  if (config.random_orientation)
    for (auto& b : layout.ap_broadside) b = rng.uniform(-kPi, kPi);
  return layout;
}

std::vector<int> greedy_epoch(const std::vector<SensingRegion>& regions,
                              std::vector<std::vector<bool>>& scanned, int start_region,
                              int first_cell) {
  const int L = static_cast<int>(regions.size());
  std::vector<int> picks(static_cast<std::size_t>(L), -1);
  std::vector<Position3D> chosen;
  chosen.reserve(static_cast<std::size_t>(L));

  for (int step = 0; step < L; ++step) {
    const int l = (start_region + step) % L;
    const auto& cells = regions[static_cast<std::size_t>(l)].cells;
    auto& done = scanned[static_cast<std::size_t>(l)];
    int pick = -1;
    const bool exhausted = std::all_of(done.begin(), done.end(), [](bool b) { return b; });
    if (exhausted) {
      pick = static_cast<int>(cells.size()) - 1;
    } else if (step == 0) {
      pick = first_cell;
      if (pick < 0 || pick >= static_cast<int>(cells.size()) || done[static_cast<std::size_t>(pick)])
        throw std::invalid_argument("first_cell must be an unscanned cell of the start region");
    } else {
      double best = -1.0;
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (done[c]) continue;
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& p : chosen) nearest = std::min(nearest, distance(p, cells[c].center));
        if (nearest > best) {
          best = nearest;
          pick = static_cast<int>(c);
        }
      }
    }
    if (!exhausted) done[static_cast<std::size_t>(pick)] = true;
    picks[static_cast<std::size_t>(l)] = pick;
    chosen.push_back(cells[static_cast<std::size_t>(pick)].center);
  }
  return picks;
}

ScanSchedule build_scan_schedule(const std::vector<SensingRegion>& regions, RandomStream& rng) {
  ScanSchedule schedule;
  if (regions.empty()) return schedule;
  std::size_t sweep = 0;
  std::vector<std::vector<bool>> scanned;
  for (const auto& r : regions) {
    sweep = std::max(sweep, r.cells.size());
    scanned.emplace_back(r.cells.size(), false);
  }
  const int L = static_cast<int>(regions.size());
  for (std::size_t n = 0; n < sweep; ++n) {
    const int start = static_cast<int>(n % static_cast<std::size_t>(L));
    const auto& done = scanned[static_cast<std::size_t>(start)];
    std::vector<int> open;
    for (std::size_t c = 0; c < done.size(); ++c)
      if (!done[c]) open.push_back(static_cast<int>(c));
    const int first = open.empty() ? 0 : open[rng.index(open.size())];
    schedule.epochs.push_back(greedy_epoch(regions, scanned, start, first));
  }
  return schedule;
}

Angles angles_from(const Position3D& array_pos, const Position3D& target_pos) {
  const double dx = target_pos.x - array_pos.x;
  const double dy = target_pos.y - array_pos.y;
  const double dz = target_pos.z - array_pos.z;
  const double horizontal = std::hypot(dx, dy);
  if (horizontal == 0.0 && dz == 0.0)
    throw std::domain_error("angles_from: coincident positions");
  return {std::atan2(dy, dx), std::atan2(dz, horizontal)};
}

}  // namespace cfisac
