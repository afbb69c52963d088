#include <filesystem>

#include <gtest/gtest.h>

#include "coseg/raster_io.hpp"
#include "coseg/synthetic.hpp"
#include "scratch.hpp"

using namespace coseg;
namespace fs = std::filesystem;

namespace {

double disagreement(const RasterPlane& map, const BinaryMask& gt) {
  std::size_t bad = 0;
  for (std::size_t i = 0; i < gt.bits.size(); ++i) {
    bad += (map.data[i] > 0.5) != (gt.bits[i] != 0);
  }
  return static_cast<double>(bad) / static_cast<double>(gt.bits.size());
}

} // namespace

TEST(Synthetic, CleanMapsAgreeWithGroundTruth) {
  ScratchDir dir;
  SyntheticSpec spec;
  spec.output_dir = dir.path().string();
  spec.group_size = 1;
  spec.seed = 4;
  const SyntheticFixture fx = gen_synthetic(spec);
  const BinaryMask gt = load_mask(fx.input_dir + "/GT/" + fx.image_ids[0] + ".png");
  EXPECT_GT(gt.count(), 0u);
  for (const auto& d : fx.saliency_dirs) {
    const RasterPlane m = load_saliency(d + "/" + fx.image_ids[0] + ".png", 64, 64);
    EXPECT_LE(disagreement(m, gt), 0.02);
  }
}

TEST(Synthetic, ShiftGivesConstantFlow) {
  ScratchDir dir;
  SyntheticSpec spec;
  spec.output_dir = dir.path().string();
  spec.group_size = 2;
  spec.shift_x = 3;
  spec.shift_y = 0;
  const SyntheticFixture fx = gen_synthetic(spec);
  const PairManifest m = PairManifest::load(fx.manifest);
  const FlowField f = load_flow(m.find(fx.image_ids[1], fx.image_ids[0])->flo_path);
  EXPECT_EQ(f, FlowField::constant(64, 64, 3.0f, 0.0f, 64, 64));
  const FlowField g = load_flow(m.find(fx.image_ids[0], fx.image_ids[1])->flo_path);
  EXPECT_EQ(g, FlowField::constant(64, 64, -3.0f, 0.0f, 64, 64));
}

TEST(Synthetic, ImagesAreTranslatedCopies) {
  ScratchDir dir;
  SyntheticSpec spec;
  spec.output_dir = dir.path().string();
  spec.group_size = 2;
  spec.offsets = {{0, 0}, {2, 1}};
  const SyntheticFixture fx = gen_synthetic(spec);
  const RasterPlane a = load_image(fx.input_dir + "/" + fx.image_ids[0] + ".png");
  const RasterPlane b = load_image(fx.input_dir + "/" + fx.image_ids[1] + ".png");
  for (int y = 1; y < 64; ++y) {
    for (int x = 2; x < 64; ++x) {
      for (int c = 0; c < 3; ++c) {
        ASSERT_EQ(b.at(x, y, c), a.at(x - 2, y - 1, c));
      }
    }
  }
}

TEST(Synthetic, ExactlyOneSourceInverted) {
  ScratchDir dir;
  SyntheticSpec spec;
  spec.output_dir = dir.path().string();
  spec.group_size = 3;
  spec.corrupted_source = 1;
  const SyntheticFixture fx = gen_synthetic(spec);
  for (const auto& id : fx.image_ids) {
    const BinaryMask gt = load_mask(fx.input_dir + "/GT/" + id + ".png");
    int inverted = 0;
    for (std::size_t j = 0; j < fx.saliency_dirs.size(); ++j) {
      const double d = disagreement(load_saliency(fx.saliency_dirs[j] + "/" + id + ".png", 64, 64), gt);
      inverted += d > 0.9;
      if (j == 1) {
        EXPECT_GT(d, 0.9);
      }
    }
    EXPECT_EQ(inverted, 1);
  }
}

TEST(Synthetic, ManifestCoversAllOrderedPairs) {
  ScratchDir dir;
  SyntheticSpec spec;
  spec.output_dir = dir.path().string();
  spec.group_size = 4;
  const SyntheticFixture fx = gen_synthetic(spec);
  EXPECT_EQ(PairManifest::load(fx.manifest).entries().size(), 12u);
}

TEST(Synthetic, RandomOffsetsAreBoundedAndSeeded) {
  const auto a = random_offsets(20, 5, 9);
  EXPECT_EQ(a, random_offsets(20, 5, 9));
  for (auto [x, y] : a) {
    EXPECT_GE(x, 0);
    EXPECT_LE(x, 5);
    EXPECT_GE(y, 0);
    EXPECT_LE(y, 5);
  }
}
