#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "coseg/errors.hpp"
#include "coseg/warp.hpp"
#include "oracles.hpp"

using namespace coseg;

namespace {

RasterPlane random_map(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RasterPlane p(w, h, 1);
  for (double& v : p.data) {
    v = u(rng);
  }
  return p;
}

RasterPlane smooth_map(int w, int h) {
  RasterPlane p(w, h, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      p.at(x, y) = 0.5 + 0.4 * std::sin(x / 6.0) * std::cos(y / 5.0);
    }
  }
  return p;
}

// Target p samples the source at c + A (p - c).
FlowField affine_flow(int w, int h, const double a[4]) {
  FlowField f = FlowField::identity(w, h);
  const double cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dx = x - cx, dy = y - cy;
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      f.du[i] = static_cast<float>(cx + a[0] * dx + a[1] * dy - x);
      f.dv[i] = static_cast<float>(cy + a[2] * dx + a[3] * dy - y);
    }
  }
  return f;
}

} // namespace

TEST(WarpMap, IdentityIsExact) {
  const RasterPlane m = random_map(9, 7, 1);
  const WarpedMap w = warp_map(m, FlowField::identity(9, 7));
  EXPECT_EQ(w.values.data, m.data);
  EXPECT_TRUE(std::all_of(w.valid.begin(), w.valid.end(), [](auto v) { return v == 1; }));
}

TEST(WarpMap, UnitShiftHandTrace) {
  RasterPlane m(3, 1, 1);
  m.data = {0.2, 0.5, 0.9};
  const WarpedMap w = warp_map(m, FlowField::constant(3, 1, 1.0f, 0.0f, 3, 1));
  EXPECT_EQ(w.values.data[0], 0.5);
  EXPECT_EQ(w.values.data[1], 0.9);
  EXPECT_EQ(w.valid, (std::vector<std::uint8_t>{1, 1, 0}));
  EXPECT_EQ(w.values.data[2], 0.0);
}

TEST(WarpMap, SentinelEverywhereIsAllInvalid) {
  const RasterPlane m = random_map(4, 4, 2);
  const WarpedMap w = warp_map(m, FlowField::constant(4, 4, kUnknownFlow, 0.0f, 4, 4));
  for (std::size_t i = 0; i < w.valid.size(); ++i) {
    EXPECT_EQ(w.valid[i], 0);
    EXPECT_EQ(w.values.data[i], 0.0);
  }
}

TEST(WarpMap, HalfPixelMarginIsValid) {
  RasterPlane m(2, 1, 1);
  m.data = {0.3, 0.7};
  const WarpedMap in = warp_map(m, FlowField::constant(2, 1, 0.5f, 0.0f, 2, 1));
  EXPECT_EQ(in.valid, (std::vector<std::uint8_t>{1, 1}));
  EXPECT_DOUBLE_EQ(in.values.data[0], 0.5);
  EXPECT_DOUBLE_EQ(in.values.data[1], 0.7); // fetch clamped at the edge
  const WarpedMap out = warp_map(m, FlowField::constant(2, 1, 0.51f, 0.0f, 2, 1));
  EXPECT_EQ(out.valid, (std::vector<std::uint8_t>{1, 0}));
}

TEST(WarpMap, RandomFlowsMatchBilinearOracleAndBounds) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<float> d(-3.0f, 3.0f);
  for (int trial = 0; trial < 20; ++trial) {
    const RasterPlane m = random_map(8, 6, trial);
    FlowField f = FlowField::identity(8, 6);
    for (std::size_t i = 0; i < f.pixel_count(); ++i) {
      f.du[i] = d(rng);
      f.dv[i] = d(rng);
    }
    const WarpedMap w = warp_map(m, f);
    const auto [lo, hi] = std::minmax_element(m.data.begin(), m.data.end());
    for (int y = 0; y < 6; ++y) {
      for (int x = 0; x < 8; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * 8 + x;
        const double sx = x + static_cast<double>(f.du[i]), sy = y + static_cast<double>(f.dv[i]);
        const bool inside = sx >= -0.5 && sx <= 7.5 && sy >= -0.5 && sy <= 5.5;
        ASSERT_EQ(w.valid[i] != 0, inside);
        if (inside) {
          EXPECT_NEAR(w.values.data[i], oracle::bilinear(m.data, 8, 6, sx, sy), 1e-12);
          EXPECT_GE(w.values.data[i], *lo);
          EXPECT_LE(w.values.data[i], *hi);
        }
      }
    }
  }
}

TEST(WarpMap, AffineRoundTripWithinTolerance) {
  const int w = 48, h = 40;
  const RasterPlane m = smooth_map(w, h);
  // small rotation with zoom, and its exact inverse; displacements stay under 1 px
  const double c = std::cos(0.01) * 1.01, s = std::sin(0.01) * 1.01;
  const double a[4] = {c, -s, s, c};
  const double det = c * c + s * s;
  const double inv[4] = {c / det, s / det, -s / det, c / det};
  const WarpedMap there = warp_map(m, affine_flow(w, h, a));
  const WarpedMap back = warp_map(there.values, affine_flow(w, h, inv));
  double worst = 0.0;
  for (int y = 2; y < h - 2; ++y) {
    for (int x = 2; x < w - 2; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      ASSERT_TRUE(back.valid[i]);
      worst = std::max(worst, std::abs(back.values.data[i] - m.data[i]));
    }
  }
  EXPECT_LE(worst, 0.02);
}

TEST(WarpMap, ValidityShrinksWithSourceBounds) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<float> d(-4.0f, 4.0f);
  FlowField big = FlowField::identity(10, 10);
  for (std::size_t i = 0; i < big.pixel_count(); ++i) {
    big.du[i] = d(rng);
    big.dv[i] = d(rng);
  }
  FlowField small = big;
  small.source_width = 7;
  small.source_height = 8;
  const WarpedMap a = warp_map(random_map(10, 10, 1), big);
  const WarpedMap b = warp_map(random_map(7, 8, 1), small);
  for (std::size_t i = 0; i < a.valid.size(); ++i) {
    EXPECT_LE(b.valid[i], a.valid[i]);
  }
}

TEST(WarpMap, ParallelMatchesReference) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<float> d(-6.0f, 6.0f);
  const RasterPlane m = random_map(33, 29, 3);
  FlowField f = FlowField::identity(31, 27);
  f.source_width = 33;
  f.source_height = 29;
  for (std::size_t i = 0; i < f.pixel_count(); ++i) {
    f.du[i] = i % 11 == 0 ? kUnknownFlow : d(rng);
    f.dv[i] = d(rng);
  }
  const WarpedMap a = warp_map(m, f), b = reference::warp_map(m, f);
  EXPECT_EQ(a.values.data, b.values.data);
  EXPECT_EQ(a.valid, b.valid);
}

TEST(WarpMap, DimensionMismatchIsArgumentError) {
  EXPECT_THROW(warp_map(random_map(5, 5, 0), FlowField::identity(4, 4)), ArgumentError);
}

TEST(WarpIntoKey, KeyAloneGivesItsOwnMaps) {
  SaliencySet maps;
  for (int j = 0; j < 4; ++j) {
    maps["k"].push_back(random_map(6, 5, j));
  }
  const auto c = warp_into_key({"k"}, maps, FlowStore{}, "k");
  ASSERT_EQ(c.size(), 4u);
  for (int j = 0; j < 4; ++j) {
    EXPECT_EQ(c[j].values.data, maps["k"][j].data);
  }
}

TEST(WarpIntoKey, CardinalityAndOrdering) {
  SaliencySet maps;
  FlowStore flows;
  const std::vector<std::string> ids = {"c", "a", "b"};
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (int j = 0; j < 4; ++j) {
      maps[ids[i]].push_back(RasterPlane(6, 5, 1, 0.1 * (i + 1) + 0.01 * j));
    }
    if (ids[i] != "b") {
      flows.insert(ids[i], "b", FlowField::identity(6, 5));
    }
  }
  const auto c = warp_into_key(ids, maps, flows, "b");
  ASSERT_EQ(c.size(), 12u);
  // a (0.2x), then b (0.3x), then c (0.1x); sources in order within each
  EXPECT_DOUBLE_EQ(c[0].values.data[0], 0.2);
  EXPECT_DOUBLE_EQ(c[3].values.data[0], 0.23);
  EXPECT_DOUBLE_EQ(c[4].values.data[0], 0.3);
  EXPECT_DOUBLE_EQ(c[8].values.data[0], 0.1);
}

TEST(WarpIntoKey, MissingFlowNamesThePair) {
  SaliencySet maps;
  maps["a"].push_back(random_map(4, 4, 0));
  maps["k"].push_back(random_map(4, 4, 1));
  try {
    warp_into_key({"a", "k"}, maps, FlowStore{}, "k");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("a -> k"), std::string::npos);
  }
}
