#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace coseg {

struct SyntheticSpec {
  std::string output_dir;
  std::string name = "synthetic";
  int group_size = 4;
  int image_size = 64;
  int sources = 4;
  std::optional<int> corrupted_source; // 0-based source index whose maps are inverted
  int shift_x = 1;                     // image i is translated by i * (shift_x, shift_y)
  int shift_y = 0;
  std::vector<std::pair<int, int>> offsets; // explicit per-image translations; overrides shift_x/y
  std::uint64_t seed = 0;
};

/// Paths of a generated fixture:
///   <out>/data/<name>/img_NN.png, <out>/data/<name>/GT/img_NN.png
///   <out>/saliency/s<j>/img_NN.png       (8-bit, j = 1..L)
///   <out>/flows/<src>__<dst>.flo, <out>/pairs.txt
///   <out>/config.txt                      (ready-to-run pipeline config)
struct SyntheticFixture {
  std::string dataset_root;
  std::string input_dir;
  std::vector<std::string> saliency_dirs;
  std::string manifest;
  std::string config;
  std::vector<std::string> image_ids;
  std::vector<std::pair<int, int>> offsets;
};

/// A shared textured ellipse over a textured background. Every image views the
/// same scene translated by its offset, so the flow between any two images is
/// an exact constant translation (emitted for all ordered pairs). Saliency
/// source maps are the ground truth blurred with a sigma = 2 Gaussian plus
/// uniform noise in [-0.1, 0.1]; the corrupted source is the inverted map.
SyntheticFixture gen_synthetic(const SyntheticSpec& spec);

/// Seeded per-image translations with components in [0, max_shift].
std::vector<std::pair<int, int>> random_offsets(int count, int max_shift, std::uint64_t seed);

} // namespace coseg
