#include "coseg/otsu.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "coseg/errors.hpp"

namespace coseg {
namespace {

using u128 = unsigned __int128;
using i128 = __int128;

// Between-class variance up to the constant factor 1/n^2, as num/den.
struct Score {
  u128 num = 0;
  u128 den = 1;
};

// a.num/a.den < b.num/b.den without overflow: compare integer parts, then remainders.
bool less(const Score& a, const Score& b) {
  const u128 qa = a.num / a.den, qb = b.num / b.den;
  if (qa != qb) {
    return qa < qb;
  }
  const u128 ra = a.num % a.den, rb = b.num % b.den;
  return ra * b.den < rb * a.den;
}

} // namespace

int quantize_bin(double value) {
  int b = static_cast<int>(std::ceil(std::clamp(value, 0.0, 1.0) * 255.0));
  b = std::clamp(b, 0, 255);
  while (b > 0 && value <= (b - 1) / 255.0) {
    --b;
  }
  while (b < 255 && value > b / 255.0) {
    ++b;
  }
  return b;
}

Histogram histogram(const RasterPlane& map) {
  Histogram hist{};
  const auto n = static_cast<std::ptrdiff_t>(map.data.size());
#pragma omp parallel
  {
    Histogram local{};
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      ++local[quantize_bin(map.data[i])];
    }
#pragma omp critical
    for (int b = 0; b < 256; ++b) {
      hist[b] += local[b];
    }
  }
  return hist;
}

namespace reference {
Histogram histogram(const RasterPlane& map) {
  Histogram hist{};
  for (double v : map.data) {
    ++hist[quantize_bin(v)];
  }
  return hist;
}
} // namespace reference

std::optional<int> otsu_bin(const Histogram& hist) {
  std::uint64_t n = 0, total_sum = 0;
  int occupied = 0;
  for (int b = 0; b < 256; ++b) {
    n += hist[b];
    total_sum += hist[b] * static_cast<std::uint64_t>(b);
    occupied += hist[b] > 0;
  }
  if (occupied < 2) {
    return std::nullopt;
  }
  // w0 w1 (mu0 - mu1)^2 = (n1 S0 - n0 S1)^2 / (n^2 n0 n1)
  std::uint64_t n0 = 0, s0 = 0;
  Score best;
  int arg = 0;
  for (int b = 0; b < 256; ++b) {
    n0 += hist[b];
    s0 += hist[b] * static_cast<std::uint64_t>(b);
    const std::uint64_t n1 = n - n0, s1 = total_sum - s0;
    Score sc;
    if (n0 > 0 && n1 > 0) {
      const i128 d = static_cast<i128>(n1) * s0 - static_cast<i128>(n0) * s1;
      const u128 ad = static_cast<u128>(d < 0 ? -d : d);
      sc = {ad * ad, static_cast<u128>(n0) * n1};
    }
    if (b == 0 || less(best, sc)) {
      best = sc;
      arg = b;
    }
  }
  return arg;
}

double otsu_threshold(const RasterPlane& map) {
  if (map.empty() || map.channels != 1) {
    throw ArgumentError("otsu_threshold expects a non-empty single-channel map");
  }
  if (const auto b = otsu_bin(histogram(map))) {
    return *b / 255.0;
  }
  return *std::max_element(map.data.begin(), map.data.end());
}

std::size_t TrimapSeed::count(SeedLabel l) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), l));
}

TrimapSeed seeds_from_otsu(const RasterPlane& map, double threshold) {
  if (map.channels != 1) {
    throw ArgumentError("seeds_from_otsu expects a single-channel map");
  }
  TrimapSeed seeds{map.width, map.height, std::vector<SeedLabel>(map.pixel_count())};
  const double hard_fg = std::min(0.9, threshold + 0.35);
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      const double v = map.at(x, y);
      const bool border = x == 0 || y == 0 || x == map.width - 1 || y == map.height - 1;
      SeedLabel l;
      if (v > threshold) {
        l = v >= hard_fg ? SeedLabel::HardForeground : SeedLabel::ProbForeground;
      } else {
        l = border ? SeedLabel::HardBackground : SeedLabel::ProbBackground;
      }
      seeds.labels[static_cast<std::size_t>(y) * map.width + x] = l;
    }
  }
  return seeds;
}

} // namespace coseg
