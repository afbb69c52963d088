#include "coseg/synthetic.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

#include "coseg/errors.hpp"
#include "coseg/raster_io.hpp"

namespace fs = std::filesystem;

namespace coseg {
namespace {

// Deterministic per-scene-point noise in [-1, 1] (splitmix64 finalizer).
double point_noise(std::uint64_t seed, int wx, int wy, std::uint64_t salt) {
  std::uint64_t z = seed ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(wx)) << 32) ^
                    static_cast<std::uint32_t>(wy) ^ (salt * 0x9E3779B97F4A7C15ULL);
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) / static_cast<double>(1ULL << 52) - 1.0;
}

struct Scene {
  double cx, cy, a, b, angle;
  double phase[4];
  double fg_color[3];
  double bg_color[3];
  std::uint64_t seed;

  bool inside(double wx, double wy) const {
    const double dx = wx - cx, dy = wy - cy;
    const double u = (dx * std::cos(angle) + dy * std::sin(angle)) / a;
    const double v = (-dx * std::sin(angle) + dy * std::cos(angle)) / b;
    return u * u + v * v <= 1.0;
  }

  void color(int wx, int wy, double out[3]) const {
    const bool fg = inside(wx, wy);
    const double* base = fg ? fg_color : bg_color;
    const double texture = fg ? 0.06 * std::sin(0.9 * wx + phase[0]) * std::cos(0.7 * wy + phase[1])
                              : 0.12 * std::sin(0.35 * wx + phase[2]) * std::sin(0.27 * wy + phase[3]);
    for (int c = 0; c < 3; ++c) {
      const double grain = (fg ? 0.04 : 0.06) * point_noise(seed, wx, wy, static_cast<std::uint64_t>(c + 1));
      out[c] = std::clamp(base[c] + texture + grain, 0.0, 1.0);
    }
  }
};

Scene make_scene(int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Scene s{};
  s.seed = seed;
  s.cx = 0.5 * size;
  s.cy = 0.5 * size;
  s.a = (0.24 + 0.06 * unit(rng)) * size;
  s.b = (0.16 + 0.05 * unit(rng)) * size;
  s.angle = unit(rng) * std::numbers::pi;
  for (double& p : s.phase) {
    p = unit(rng) * 2.0 * std::numbers::pi;
  }
  // Warm object over a cool background.
  s.fg_color[0] = 0.75 + 0.15 * unit(rng);
  s.fg_color[1] = 0.25 + 0.2 * unit(rng);
  s.fg_color[2] = 0.1 + 0.1 * unit(rng);
  s.bg_color[0] = 0.15 + 0.15 * unit(rng);
  s.bg_color[1] = 0.35 + 0.2 * unit(rng);
  s.bg_color[2] = 0.35 + 0.25 * unit(rng);
  return s;
}

std::string image_name(int i) {
  std::ostringstream os;
  os << "img_" << std::setw(2) << std::setfill('0') << i;
  return os.str();
}

} // namespace

std::vector<std::pair<int, int>> random_offsets(int count, int max_shift, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5DEECE66DULL);
  std::uniform_int_distribution<int> pick(0, std::max(0, max_shift));
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < count; ++i) {
    const int x = pick(rng);
    const int y = pick(rng);
    out.emplace_back(x, y);
  }
  return out;
}

SyntheticFixture gen_synthetic(const SyntheticSpec& spec) {
  if (spec.group_size < 1 || spec.sources < 1 || spec.image_size < 8) {
    throw ArgumentError("gen_synthetic: need group_size >= 1, sources >= 1, image_size >= 8");
  }
  if (spec.corrupted_source && (*spec.corrupted_source < 0 || *spec.corrupted_source >= spec.sources)) {
    throw ArgumentError("gen_synthetic: corrupted source index out of range");
  }
  if (!spec.offsets.empty() && static_cast<int>(spec.offsets.size()) != spec.group_size) {
    throw ArgumentError("gen_synthetic: need one offset per image");
  }
  const int n = spec.image_size;
  const fs::path root(spec.output_dir);
  SyntheticFixture fx;
  fx.dataset_root = (root / "data").string();
  fx.input_dir = (root / "data" / spec.name).string();
  fx.manifest = (root / "pairs.txt").string();
  fx.config = (root / "config.txt").string();
  fs::create_directories(fs::path(fx.input_dir) / "GT");
  fs::create_directories(root / "flows");
  for (int j = 0; j < spec.sources; ++j) {
    fx.saliency_dirs.push_back((root / "saliency" / ("s" + std::to_string(j + 1))).string());
    fs::create_directories(fx.saliency_dirs.back());
  }

  fx.offsets = spec.offsets;
  if (fx.offsets.empty()) {
    for (int i = 0; i < spec.group_size; ++i) {
      fx.offsets.emplace_back(i * spec.shift_x, i * spec.shift_y);
    }
  }
  const Scene scene = make_scene(n, spec.seed);

  for (int i = 0; i < spec.group_size; ++i) {
    const std::string id = image_name(i);
    fx.image_ids.push_back(id);
    const auto [ox, oy] = fx.offsets[i];
    RasterPlane image(n, n, 3);
    BinaryMask gt(n, n);
    cv::Mat gt_mat(n, n, CV_64FC1);
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        double rgb[3];
        scene.color(x - ox, y - oy, rgb);
        for (int c = 0; c < 3; ++c) {
          image.at(x, y, c) = rgb[c];
        }
        const bool fg = scene.inside(x - ox, y - oy);
        gt.set(x, y, fg);
        gt_mat.at<double>(y, x) = fg ? 1.0 : 0.0;
      }
    }
    save_image(image, (fs::path(fx.input_dir) / (id + ".png")).string());
    save_mask(gt, (fs::path(fx.input_dir) / "GT" / (id + ".png")).string());

    cv::Mat blurred;
    cv::GaussianBlur(gt_mat, blurred, cv::Size(0, 0), 2.0, 2.0, cv::BORDER_REPLICATE);
    for (int j = 0; j < spec.sources; ++j) {
      std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                        static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), 0x5A11E7CEu};
      std::mt19937_64 rng(seq);
      std::uniform_real_distribution<double> noise(-0.1, 0.1);
      RasterPlane map(n, n, 1);
      for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
          double v = std::clamp(blurred.at<double>(y, x) + noise(rng), 0.0, 1.0);
          if (spec.corrupted_source && *spec.corrupted_source == j) {
            v = 1.0 - v;
          }
          map.at(x, y) = v;
        }
      }
      save_gray8(map, (fs::path(fx.saliency_dirs[j]) / (id + ".png")).string());
    }
  }

  PairManifest manifest;
  for (int u = 0; u < spec.group_size; ++u) {
    for (int v = 0; v < spec.group_size; ++v) {
      if (u == v) {
        continue;
      }
      const float du = static_cast<float>(fx.offsets[u].first - fx.offsets[v].first);
      const float dv = static_cast<float>(fx.offsets[u].second - fx.offsets[v].second);
      const std::string flo = (root / "flows" / (fx.image_ids[u] + "__" + fx.image_ids[v] + ".flo")).string();
      save_flow(FlowField::constant(n, n, du, dv, n, n), flo);
      manifest.add({fx.image_ids[u], fx.image_ids[v], flo, n, n});
    }
  }
  manifest.save(fx.manifest);

  std::ofstream cfg(fx.config);
  if (!cfg) {
    throw IoError("cannot write " + fx.config);
  }
  cfg << "input_dir = " << fx.input_dir << '\n';
  cfg << "saliency_dirs = ";
  for (std::size_t j = 0; j < fx.saliency_dirs.size(); ++j) {
    cfg << (j ? "," : "") << fx.saliency_dirs[j];
  }
  cfg << '\n';
  cfg << "flow_manifest = " << fx.manifest << '\n';
  cfg << "output_dir = " << (root / "result").string() << '\n';
  cfg << "seed = " << spec.seed << '\n';
  return fx;
}

} // namespace coseg
