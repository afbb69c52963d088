#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "coseg/raster.hpp"

namespace coseg {

using Histogram = std::array<std::uint64_t, 256>;

/// Bin of a value in [0,1]: the smallest b with v <= b / 255. With this
/// quantization "value > b/255" and "bin > b" agree exactly.
int quantize_bin(double value);

Histogram histogram(const RasterPlane& map);
namespace reference {
Histogram histogram(const RasterPlane& map);
}

/// Bin b maximizing the between-class variance w0*w1*(mu0-mu1)^2 of the split
/// {bins <= b} | {bins > b}; ties resolve to the smallest b. Empty when fewer
/// than two bins are occupied. Comparisons are exact (integer arithmetic).
std::optional<int> otsu_bin(const Histogram& hist);

/// Threshold t = b/255 from otsu_bin. A map whose values all share one bin
/// returns its maximum, so nothing is strictly above t.
double otsu_threshold(const RasterPlane& map);

enum class SeedLabel : std::uint8_t { HardBackground, ProbBackground, ProbForeground, HardForeground };

inline bool is_foreground(SeedLabel l) {
  return l == SeedLabel::ProbForeground || l == SeedLabel::HardForeground;
}
inline bool is_hard(SeedLabel l) {
  return l == SeedLabel::HardForeground || l == SeedLabel::HardBackground;
}

struct TrimapSeed {
  int width = 0;
  int height = 0;
  std::vector<SeedLabel> labels;

  SeedLabel at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
  std::size_t count(SeedLabel l) const;
};

/// value > t: ProbForeground, upgraded to HardForeground when value >= min(0.9, t + 0.35).
/// value <= t: ProbBackground, HardBackground on the one-pixel image border.
TrimapSeed seeds_from_otsu(const RasterPlane& map, double threshold);

} // namespace coseg
