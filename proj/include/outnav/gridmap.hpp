// Copyright 2026 The outnav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/*
 * gridmap.hpp
 *
 * Robot-centric square grid maps and the operators every other module
 * builds on: point binning, gradient magnitude, [0,100] normalization,
 * bilinear sampling and band counting.
 *
 * Layout: row index runs along +y, column index along +x, values are stored
 * row-major. Cell (0, 0) touches the lower-left corner of the grid. Invalid
 * (unobserved) cells always hold 0.0 and are skipped by every statistic.
 */

#ifndef OUTNAV_GRIDMAP_HPP
#define OUTNAV_GRIDMAP_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "outnav/geometry.hpp"

namespace outnav {

struct CellIndex {
  int row = 0;
  int col = 0;
  friend bool operator==(CellIndex, CellIndex) = default;
};

/// One lidar return. Intensity is on the [0,100] scale.
struct CloudPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;
};

class GridMap {
 public:
  GridMap() = default;

  GridMap(int size_n, double resolution, Vec2 center)
      : size_n_(size_n), resolution_(resolution), center_(center) {
    if (size_n < 3 || size_n % 2 == 0) {
      throw std::invalid_argument("GridMap: size_n must be odd and >= 3, got " +
                                  std::to_string(size_n));
    }
    if (!(resolution > 0.0) || !std::isfinite(resolution)) {
      throw std::invalid_argument("GridMap: resolution must be > 0");
    }
    if (!std::isfinite(center.x) || !std::isfinite(center.y)) {
      throw std::invalid_argument("GridMap: center must be finite");
    }
    const auto cells = static_cast<std::size_t>(size_n) * size_n;
    values_.assign(cells, 0.0);
    valid_.assign(cells, 0);
  }

  int size() const { return size_n_; }
  double resolution() const { return resolution_; }
  Vec2 center() const { return center_; }
  std::size_t cell_count() const { return values_.size(); }

  double side_length() const { return size_n_ * resolution_; }
  Vec2 lower_left() const {
    const double half = 0.5 * side_length();
    return {center_.x - half, center_.y - half};
  }

  bool in_range(int row, int col) const {
    return row >= 0 && col >= 0 && row < size_n_ && col < size_n_;
  }
  bool in_range(CellIndex c) const { return in_range(c.row, c.col); }

  double value(int row, int col) const { return values_[flat(row, col)]; }
  bool valid(int row, int col) const { return valid_[flat(row, col)] != 0; }
  double value(CellIndex c) const { return value(c.row, c.col); }
  bool valid(CellIndex c) const { return valid(c.row, c.col); }

  void set(int row, int col, double v) {
    values_[flat(row, col)] = v;
    valid_[flat(row, col)] = 1;
  }
  void invalidate(int row, int col) {
    values_[flat(row, col)] = 0.0;
    valid_[flat(row, col)] = 0;
  }

  /// Cell containing world point (x, y); absent outside the grid extent.
  std::optional<CellIndex> cell_at(double x, double y) const {
    const Vec2 ll = lower_left();
    const double fx = std::floor((x - ll.x) / resolution_);
    const double fy = std::floor((y - ll.y) / resolution_);
    if (!(fx >= 0.0 && fy >= 0.0 && fx < size_n_ && fy < size_n_)) {
      return std::nullopt;
    }
    return CellIndex{static_cast<int>(fy), static_cast<int>(fx)};
  }

  Vec2 cell_center(int row, int col) const {
    const Vec2 ll = lower_left();
    return {ll.x + (col + 0.5) * resolution_, ll.y + (row + 0.5) * resolution_};
  }

  std::size_t valid_count() const {
    return static_cast<std::size_t>(
        std::count(valid_.begin(), valid_.end(), char{1}));
  }

  std::span<const double> values() const { return values_; }
  std::span<const char> validity() const { return valid_; }

  /// Same geometry, no valid cells.
  GridMap blank_like() const { return GridMap(size_n_, resolution_, center_); }

  friend bool operator==(const GridMap&, const GridMap&) = default;

 private:
  std::size_t flat(int row, int col) const {
    return static_cast<std::size_t>(row) * size_n_ + col;
  }

  int size_n_ = 0;
  double resolution_ = 0.0;
  Vec2 center_{};
  std::vector<double> values_;
  std::vector<char> valid_;
};

using GradientMap = GridMap;
using IntensityMap = GridMap;

struct GridGeometry {
  int size_n = 61;
  double resolution = 0.25;
};

/// Nearest lattice point (multiple of `resolution`). Centering robot-centric
/// grids there keeps cell boundaries fixed in the world as the robot moves.
inline Vec2 lattice_center(Vec2 p, double resolution) {
  return {std::round(p.x / resolution) * resolution, std::round(p.y / resolution) * resolution};
}

struct ValueRange {
  double min = 0.0;
  double max = 0.0;
};

/// Min/max over valid cells; absent for an all-invalid map.
inline std::optional<ValueRange> valid_range(const GridMap& map) {
  std::optional<ValueRange> out;
  for (int r = 0; r < map.size(); ++r) {
    for (int c = 0; c < map.size(); ++c) {
      if (!map.valid(r, c)) continue;
      const double v = map.value(r, c);
      if (!out) {
        out = ValueRange{v, v};
      } else {
        out->min = std::min(out->min, v);
        out->max = std::max(out->max, v);
      }
    }
  }
  return out;
}

// ─── Binning ────────────────────────────────────────────────────────────────

enum class Reducer { kMaxZ, kMeanIntensity };

struct BinningStats {
  std::size_t accepted = 0;
  std::size_t outside = 0;
  std::size_t rejected_nonfinite = 0;
};

/// Bins points into a fresh grid. Cells with at least one point are valid.
/// kMeanIntensity uses compensated summation so the result does not depend
/// on point order beyond rounding of the final division.
inline GridMap map_from_points(std::span<const CloudPoint> points, int size_n,
                               double resolution, Vec2 center, Reducer reducer,
                               BinningStats* stats = nullptr) {
  GridMap map(size_n, resolution, center);
  const std::size_t cells = map.cell_count();
  std::vector<double> acc(cells, 0.0);
  std::vector<double> comp(cells, 0.0);
  std::vector<std::size_t> count(cells, 0);
  BinningStats local;

  for (const CloudPoint& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z) ||
        !std::isfinite(p.intensity)) {
      ++local.rejected_nonfinite;
      continue;
    }
    const auto cell = map.cell_at(p.x, p.y);
    if (!cell) {
      ++local.outside;
      continue;
    }
    ++local.accepted;
    const std::size_t i = static_cast<std::size_t>(cell->row) * size_n + cell->col;
    if (reducer == Reducer::kMaxZ) {
      acc[i] = count[i] == 0 ? p.z : std::max(acc[i], p.z);
    } else {
      // Neumaier summation.
      const double t = acc[i] + p.intensity;
      if (std::abs(acc[i]) >= std::abs(p.intensity)) {
        comp[i] += (acc[i] - t) + p.intensity;
      } else {
        comp[i] += (p.intensity - t) + acc[i];
      }
      acc[i] = t;
    }
    ++count[i];
  }

  for (int r = 0; r < size_n; ++r) {
    for (int c = 0; c < size_n; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * size_n + c;
      if (count[i] == 0) continue;
      if (reducer == Reducer::kMaxZ) {
        map.set(r, c, acc[i]);
      } else {
        map.set(r, c, (acc[i] + comp[i]) / static_cast<double>(count[i]));
      }
    }
  }
  if (stats) *stats = local;
  return map;
}

// ─── Gradient ───────────────────────────────────────────────────────────────

namespace detail {

// Derivative along one axis at (r, c), stepping (dr, dc). Central difference
// when both neighbours are valid, one-sided toward the valid one otherwise.
inline std::optional<double> axis_derivative(const GridMap& m, int r, int c,
                                             int dr, int dc) {
  const bool fwd = m.in_range(r + dr, c + dc) && m.valid(r + dr, c + dc);
  const bool bwd = m.in_range(r - dr, c - dc) && m.valid(r - dr, c - dc);
  if (fwd && bwd) {
    return (m.value(r + dr, c + dc) - m.value(r - dr, c - dc)) / 2.0;
  }
  if (fwd) return m.value(r + dr, c + dc) - m.value(r, c);
  if (bwd) return m.value(r, c) - m.value(r - dr, c - dc);
  return std::nullopt;
}

}  // namespace detail

/// Gradient magnitude in map-value per cell. A cell is valid in the output
/// only if it is valid and has a valid neighbour along both axes.
inline GradientMap gradient_map(const GridMap& map) {
  GradientMap out = map.blank_like();
  for (int r = 0; r < map.size(); ++r) {
    for (int c = 0; c < map.size(); ++c) {
      if (!map.valid(r, c)) continue;
      const auto gx = detail::axis_derivative(map, r, c, 0, 1);
      const auto gy = detail::axis_derivative(map, r, c, 1, 0);
      if (!gx || !gy) continue;
      out.set(r, c, std::sqrt(*gx * *gx + *gy * *gy));
    }
  }
  return out;
}

// ─── Normalization ──────────────────────────────────────────────────────────

/// Maps lo -> 0 and hi -> 100 linearly, clamped. A degenerate range maps every
/// valid cell to 0.
inline GridMap normalize(const GridMap& map, double lo, double hi) {
  if (hi < lo) throw std::invalid_argument("normalize: hi must be >= lo");
  GridMap out = map.blank_like();
  const double span = hi - lo;
  for (int r = 0; r < map.size(); ++r) {
    for (int c = 0; c < map.size(); ++c) {
      if (!map.valid(r, c)) continue;
      if (span == 0.0) {
        out.set(r, c, 0.0);
        continue;
      }
      const double v = (map.value(r, c) - lo) / span * 100.0;
      out.set(r, c, std::clamp(v, 0.0, 100.0));
    }
  }
  return out;
}

// ─── Sampling ───────────────────────────────────────────────────────────────

/// Bilinear read at world (x, y). Falls back to the nearest valid cell within
/// one cell of the sample when any corner is missing.
inline std::optional<double> bilinear_sample(const GridMap& map, double x,
                                             double y) {
  const Vec2 ll = map.lower_left();
  const double side = map.side_length();
  if (!(x >= ll.x && y >= ll.y && x <= ll.x + side && y <= ll.y + side)) {
    return std::nullopt;
  }
  const double res = map.resolution();
  const double fc = (x - ll.x) / res - 0.5;
  const double fr = (y - ll.y) / res - 0.5;
  const int c0 = static_cast<int>(std::floor(fc));
  const int r0 = static_cast<int>(std::floor(fr));
  const double tx = fc - c0;
  const double ty = fr - r0;

  auto ok = [&](int r, int c) { return map.in_range(r, c) && map.valid(r, c); };
  if (ok(r0, c0) && ok(r0, c0 + 1) && ok(r0 + 1, c0) && ok(r0 + 1, c0 + 1)) {
    const double v00 = map.value(r0, c0);
    const double v01 = map.value(r0, c0 + 1);
    const double v10 = map.value(r0 + 1, c0);
    const double v11 = map.value(r0 + 1, c0 + 1);
    const double bottom = v00 + tx * (v01 - v00);
    const double top = v10 + tx * (v11 - v10);
    return bottom + ty * (top - bottom);
  }

  const int rc = std::clamp(static_cast<int>(std::floor((y - ll.y) / res)), 0,
                            map.size() - 1);
  const int cc = std::clamp(static_cast<int>(std::floor((x - ll.x) / res)), 0,
                            map.size() - 1);
  std::optional<double> best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int r = rc - 1; r <= rc + 1; ++r) {
    for (int c = cc - 1; c <= cc + 1; ++c) {
      if (!ok(r, c)) continue;
      const Vec2 p = map.cell_center(r, c);
      const double d2 = (p.x - x) * (p.x - x) + (p.y - y) * (p.y - y);
      if (d2 <= res * res && d2 < best_d2) {
        best_d2 = d2;
        best = map.value(r, c);
      }
    }
  }
  return best;
}

/// Fraction of valid cells whose value lies in [lo, hi]; 0 for an empty map.
inline double value_histogram_fraction(const GridMap& map, double lo, double hi) {
  if (hi < lo) throw std::invalid_argument("value_histogram_fraction: lo > hi");
  std::size_t total = 0;
  std::size_t in_band = 0;
  for (int r = 0; r < map.size(); ++r) {
    for (int c = 0; c < map.size(); ++c) {
      if (!map.valid(r, c)) continue;
      ++total;
      const double v = map.value(r, c);
      if (v >= lo && v <= hi) ++in_band;
    }
  }
  return total == 0 ? 0.0
                    : static_cast<double>(in_band) / static_cast<double>(total);
}

}  // namespace outnav

#endif  // OUTNAV_GRIDMAP_HPP
