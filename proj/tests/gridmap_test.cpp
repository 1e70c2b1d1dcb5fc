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

// Tests for gridmap.hpp.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>
#include "outnav/gridmap.hpp"
#include "test_oracles.hpp"

namespace outnav {
namespace {

TEST(MapFromPoints, SinglePointAtCenter) {
  const std::vector<CloudPoint> pts = {{0.0, 0.0, 1.2, 0.0}};
  const GridMap m = map_from_points(pts, 61, 0.25, {0.0, 0.0}, Reducer::kMaxZ);
  EXPECT_EQ(m.valid_count(), 1u);
  EXPECT_TRUE(m.valid(30, 30));
  EXPECT_EQ(m.value(30, 30), 1.2);
}

TEST(MapFromPoints, MaxOfTwoInOneCell) {
  const std::vector<CloudPoint> pts = {{0.01, 0.01, 1.0, 0.0}, {0.02, -0.03, 2.0, 0.0}};
  const GridMap m = map_from_points(pts, 61, 0.25, {0.0, 0.0}, Reducer::kMaxZ);
  EXPECT_EQ(m.valid_count(), 1u);
  EXPECT_EQ(m.value(30, 30), 2.0);
}

TEST(MapFromPoints, EmptyAndNonFinite) {
  BinningStats stats;
  const GridMap empty = map_from_points({}, 5, 1.0, {0.0, 0.0}, Reducer::kMaxZ, &stats);
  EXPECT_EQ(empty.valid_count(), 0u);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const std::vector<CloudPoint> pts = {{nan, 0.0, 1.0, 0.0}, {0.0, 0.0, 1.0, 0.0},
                                       {100.0, 0.0, 1.0, 0.0}};
  const GridMap m = map_from_points(pts, 5, 1.0, {0.0, 0.0}, Reducer::kMaxZ, &stats);
  EXPECT_EQ(stats.rejected_nonfinite, 1u);
  EXPECT_EQ(stats.outside, 1u);
  EXPECT_EQ(stats.accepted, 1u);
  EXPECT_EQ(m.valid_count(), 1u);
}

TEST(MapFromPoints, RejectsBadGeometry) {
  EXPECT_THROW(GridMap(4, 0.25, {0, 0}), std::invalid_argument);
  EXPECT_THROW(GridMap(5, 0.0, {0, 0}), std::invalid_argument);
}

TEST(MapFromPoints, PlaneMatchesBruteForce) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  std::vector<CloudPoint> pts;
  for (int i = 0; i < 10000; ++i) pts.push_back({u(rng), u(rng), 0.5, 20.0});
  const Vec2 center{0.3, -0.2};
  const GridMap m = map_from_points(pts, 61, 0.25, center, Reducer::kMaxZ);
  const GridMap want = oracle::bin_points(pts, 61, 0.25, center, /*max_z=*/true);
  int covered = 0;
  for (int r = 0; r < 61; ++r) {
    for (int c = 0; c < 61; ++c) {
      ASSERT_EQ(m.valid(r, c), want.valid(r, c)) << r << "," << c;
      if (!m.valid(r, c)) continue;
      ++covered;
      EXPECT_EQ(m.value(r, c), 0.5);
      EXPECT_EQ(m.value(r, c), want.value(r, c));
    }
  }
  EXPECT_GT(covered, 3000);
}

TEST(MapFromPoints, MeanIntensityMatchesOracleAndIgnoresOrder) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> inten(0.0, 100.0);
  std::vector<CloudPoint> pts;
  for (int i = 0; i < 5000; ++i) pts.push_back({u(rng), u(rng), u(rng), inten(rng)});
  const GridMap a = map_from_points(pts, 15, 0.3, {0.0, 0.0}, Reducer::kMeanIntensity);
  const GridMap want = oracle::bin_points(pts, 15, 0.3, {0.0, 0.0}, /*max_z=*/false);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(pts.begin(), pts.end(), rng);
    const GridMap b = map_from_points(pts, 15, 0.3, {0.0, 0.0}, Reducer::kMeanIntensity);
    const GridMap bz = map_from_points(pts, 15, 0.3, {0.0, 0.0}, Reducer::kMaxZ);
    const GridMap az = oracle::bin_points(pts, 15, 0.3, {0.0, 0.0}, /*max_z=*/true);
    for (int r = 0; r < 15; ++r) {
      for (int c = 0; c < 15; ++c) {
        ASSERT_EQ(a.valid(r, c), b.valid(r, c));
        if (!a.valid(r, c)) continue;
        EXPECT_NEAR(b.value(r, c), want.value(r, c), 1e-9);
        EXPECT_NEAR(a.value(r, c), b.value(r, c), 1e-9);
        EXPECT_EQ(bz.value(r, c), az.value(r, c));
      }
    }
  }
}

TEST(GradientMap, ConstantMapIsZero) {
  GridMap m(9, 0.25, {0.0, 0.0});
  for (int r = 0; r < 9; ++r) {
    for (int c = 0; c < 9; ++c) m.set(r, c, 50.0);
  }
  const GradientMap g = gradient_map(m);
  EXPECT_EQ(g.valid_count(), 81u);
  for (double v : g.values()) EXPECT_EQ(v, 0.0);
}

TEST(GradientMap, ThreeByThreeColumnRamp) {
  GridMap m(3, 1.0, {0.0, 0.0});
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m.set(r, c, 30.0 * c);
  }
  const GradientMap g = gradient_map(m);
  EXPECT_EQ(g.value(1, 1), 30.0);
  const GridMap want = oracle::finite_difference_gradient(m);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) EXPECT_EQ(g.value(r, c), want.value(r, c));
  }
}

TEST(GradientMap, SingleValidCellGivesNothing) {
  GridMap m(5, 1.0, {0.0, 0.0});
  m.set(2, 2, 10.0);
  EXPECT_EQ(gradient_map(m).valid_count(), 0u);
}

TEST(GradientMap, NeedsNeighbourOnBothAxes) {
  GridMap m(5, 1.0, {0.0, 0.0});
  for (int c = 0; c < 5; ++c) m.set(2, c, 10.0 * c);  // one row only
  EXPECT_EQ(gradient_map(m).valid_count(), 0u);
}

TEST(GradientMap, MatchesFiniteDifferenceOracleOnRandomMaps) {
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> val(0.0, 100.0);
  std::bernoulli_distribution hole(0.15);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + 2 * static_cast<int>(rng() % 10);
    GridMap m(n, 0.25, {0.0, 0.0});
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        if (!hole(rng)) m.set(r, c, val(rng));
      }
    }
    const GradientMap g = gradient_map(m);
    const GridMap want = oracle::finite_difference_gradient(m);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        ASSERT_EQ(g.valid(r, c), want.valid(r, c)) << "trial " << trial;
        if (g.valid(r, c)) worst = std::max(worst, std::abs(g.value(r, c) - want.value(r, c)));
      }
    }
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(Normalize, Examples) {
  GridMap m(3, 1.0, {0.0, 0.0});
  m.set(0, 0, 1.0);
  m.set(0, 1, -3.0);
  m.set(0, 2, 2.0);
  const GridMap n = normalize(m, 0.0, 2.0);
  EXPECT_EQ(n.value(0, 0), 50.0);
  EXPECT_EQ(n.value(0, 1), 0.0);
  EXPECT_EQ(n.value(0, 2), 100.0);
  EXPECT_FALSE(n.valid(1, 1));
  EXPECT_THROW(normalize(m, 2.0, 0.0), std::invalid_argument);
  const GridMap flat = normalize(m, 1.0, 1.0);
  EXPECT_EQ(flat.valid_count(), 3u);
  for (double v : flat.values()) EXPECT_EQ(v, 0.0);
}

TEST(Normalize, Idempotent) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> val(-1.0, 3.0);
  GridMap m(11, 0.25, {0.0, 0.0});
  for (int r = 0; r < 11; ++r) {
    for (int c = 0; c < 11; ++c) {
      if ((r + c) % 7) m.set(r, c, val(rng));
    }
  }
  const GridMap once = normalize(m, -0.5, 2.5);
  EXPECT_EQ(normalize(once, 0.0, 100.0), once);
}

TEST(BilinearSample, Identities) {
  GridMap m(5, 0.5, {1.0, -1.0});
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> val(0.0, 100.0);
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 5; ++c) m.set(r, c, val(rng));
  }
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 5; ++c) {
      const Vec2 p = m.cell_center(r, c);
      EXPECT_EQ(bilinear_sample(m, p.x, p.y).value(), m.value(r, c));
    }
  }

  GridMap two(3, 1.0, {0.0, 0.0});
  for (int r = 0; r < 3; ++r) {
    two.set(r, 0, 0.0);
    two.set(r, 1, 100.0);
    two.set(r, 2, 100.0);
  }
  const Vec2 a = two.cell_center(1, 0);
  EXPECT_DOUBLE_EQ(bilinear_sample(two, a.x + 0.5, a.y).value(), 50.0);
}

TEST(BilinearSample, FallbackAndAbsent) {
  GridMap m(5, 1.0, {0.0, 0.0});
  EXPECT_FALSE(bilinear_sample(m, 0.0, 0.0).has_value());
  EXPECT_FALSE(bilinear_sample(m, 10.0, 0.0).has_value());
  m.set(2, 2, 42.0);
  // Between centers, three corners missing: nearest valid cell.
  EXPECT_EQ(bilinear_sample(m, 0.3, 0.3).value(), 42.0);
  EXPECT_FALSE(bilinear_sample(m, -2.0, -2.0).has_value());
}

TEST(ValueHistogramFraction, Counting) {
  GridMap m(11, 1.0, {0.0, 0.0});
  int k = 0;
  for (int r = 0; r < 10; ++r) {
    for (int c = 0; c < 10; ++c) m.set(r, c, k++ < 7 ? 55.0 : 90.0);
  }
  EXPECT_DOUBLE_EQ(value_histogram_fraction(m, 40.0, 70.0), 0.07);

  GridMap full(5, 1.0, {0.0, 0.0});
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 5; ++c) full.set(r, c, 100.0);
  }
  EXPECT_EQ(value_histogram_fraction(full, 40.0, 70.0), 0.0);
  EXPECT_EQ(value_histogram_fraction(GridMap(5, 1.0, {0, 0}), 40.0, 70.0), 0.0);
}

TEST(ValueHistogramFraction, MatchesCountingOracle) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> val(0.0, 100.0);
  std::bernoulli_distribution hole(0.3);
  for (int trial = 0; trial < 50; ++trial) {
    GridMap m(21, 0.25, {0.0, 0.0});
    for (int r = 0; r < 21; ++r) {
      for (int c = 0; c < 21; ++c) {
        if (!hole(rng)) m.set(r, c, val(rng));
      }
    }
    std::size_t in = 0, total = 0;
    for (std::size_t i = 0; i < m.cell_count(); ++i) {
      if (!m.validity()[i]) continue;
      ++total;
      if (m.values()[i] >= 40.0 && m.values()[i] <= 70.0) ++in;
    }
    EXPECT_EQ(value_histogram_fraction(m, 40.0, 70.0), double(in) / double(total));
  }
}

TEST(LatticeCenter, SnapsToMultiples) {
  const Vec2 c = lattice_center({1.13, -0.37}, 0.25);
  EXPECT_DOUBLE_EQ(c.x, 1.25);
  EXPECT_DOUBLE_EQ(c.y, -0.25);
}

}  // namespace
}  // namespace outnav
