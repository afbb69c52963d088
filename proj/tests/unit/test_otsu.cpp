#include <random>

#include <gtest/gtest.h>

#include "coseg/otsu.hpp"
#include "oracles.hpp"

using namespace coseg;

namespace {

RasterPlane row(const std::vector<double>& v) {
  RasterPlane p(static_cast<int>(v.size()), 1, 1);
  p.data = v;
  return p;
}

} // namespace

TEST(Otsu, TwoLevelsPickSmallestTie) {
  const RasterPlane m = row({0, 0, 0, 1, 1});
  const double t = otsu_threshold(m);
  EXPECT_EQ(t, 0.0);
  int fg = 0;
  for (double v : m.data) {
    fg += v > t;
  }
  EXPECT_EQ(fg, 2);
}

TEST(Otsu, ConstantMapHasNoForeground) {
  EXPECT_EQ(otsu_threshold(RasterPlane(4, 4, 1, 0.5)), 0.5);
  EXPECT_EQ(otsu_bin(histogram(RasterPlane(4, 4, 1, 0.5))), std::nullopt);
}

TEST(Otsu, BimodalSplitsAtLowerMode) {
  std::vector<double> v(50, 0.1);
  v.insert(v.end(), 50, 0.9);
  const double t = otsu_threshold(row(v));
  EXPECT_GE(t, 0.1);
  EXPECT_LT(t, 0.9);
  EXPECT_EQ(t, quantize_bin(0.1) / 255.0);
}

TEST(Otsu, QuantizationAgreesWithComparison) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100000; ++i) {
    const double v = u(rng);
    const int b = quantize_bin(v);
    ASSERT_LE(v, b / 255.0);
    if (b > 0) {
      ASSERT_GT(v, (b - 1) / 255.0);
    }
  }
  for (int b = 0; b < 256; ++b) {
    EXPECT_EQ(quantize_bin(b / 255.0), b);
  }
}

TEST(Otsu, MatchesExactBruteForce) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 150; ++trial) {
    Histogram h{};
    const int occupied = 2 + static_cast<int>(rng() % 40);
    for (int i = 0; i < occupied; ++i) {
      h[rng() % 256] += 1 + rng() % 1000;
    }
    if (std::count_if(h.begin(), h.end(), [](auto c) { return c > 0; }) < 2) {
      continue;
    }
    EXPECT_EQ(otsu_bin(h), oracle::otsu_brute_force(h));
  }
}

TEST(Otsu, ParallelHistogramMatchesReference) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RasterPlane m(123, 77, 1);
  for (double& v : m.data) {
    v = u(rng);
  }
  EXPECT_EQ(histogram(m), reference::histogram(m));
}

TEST(Seeds, ConstantMapIsProbBackgroundWithHardBorder) {
  const TrimapSeed s = seeds_from_otsu(RasterPlane(5, 4, 1, 0.5), 0.5);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 5; ++x) {
      const bool border = x == 0 || y == 0 || x == 4 || y == 3;
      EXPECT_EQ(s.at(x, y), border ? SeedLabel::HardBackground : SeedLabel::ProbBackground);
    }
  }
}

TEST(Seeds, BlobCoreIsHardForeground) {
  RasterPlane m(9, 9, 1, 0.05);
  for (int y = 3; y < 6; ++y) {
    for (int x = 3; x < 6; ++x) {
      m.at(x, y) = 0.95;
    }
  }
  const double t = otsu_threshold(m);
  ASSERT_GE(t, 0.05);
  ASSERT_LT(t, 0.95);
  const TrimapSeed s = seeds_from_otsu(m, t);
  EXPECT_EQ(s.at(4, 4), SeedLabel::HardForeground);
  EXPECT_EQ(s.at(0, 0), SeedLabel::HardBackground);
  EXPECT_EQ(s.at(1, 1), SeedLabel::ProbBackground);
  EXPECT_EQ(s.count(SeedLabel::HardForeground), 9u);
  EXPECT_EQ(s.count(SeedLabel::ProbForeground), 0u);
}

TEST(Seeds, BetweenThresholdAndHardBandIsProbable) {
  RasterPlane m(3, 3, 1, 0.0);
  m.at(1, 1) = 0.6;
  EXPECT_EQ(seeds_from_otsu(m, 0.5).at(1, 1), SeedLabel::ProbForeground);
  m.at(1, 1) = 0.85;
  EXPECT_EQ(seeds_from_otsu(m, 0.5).at(1, 1), SeedLabel::HardForeground);
}

TEST(Seeds, ValueAtThresholdIsBackground) {
  RasterPlane m(3, 3, 1, 0.0);
  m.at(1, 1) = 0.4;
  EXPECT_EQ(seeds_from_otsu(m, 0.4).at(1, 1), SeedLabel::ProbBackground);
}

TEST(Seeds, HardBandCapsAtPointNine) {
  RasterPlane m(3, 3, 1, 0.0);
  m.at(1, 1) = 0.9;
  EXPECT_EQ(seeds_from_otsu(m, 0.7).at(1, 1), SeedLabel::HardForeground);
  m.at(1, 1) = 0.89;
  EXPECT_EQ(seeds_from_otsu(m, 0.7).at(1, 1), SeedLabel::ProbForeground);
  m.at(1, 1) = 0.45;
  EXPECT_EQ(seeds_from_otsu(m, 0.1).at(1, 1), SeedLabel::HardForeground);
}
