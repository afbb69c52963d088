#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coseg/gmm.hpp"
#include "coseg/maxflow.hpp"
#include "coseg/otsu.hpp"
#include "coseg/raster.hpp"

namespace coseg {

struct GrabCutParams {
  int iterations = 5;
  int components = 5;
  double gamma = 50.0;
  std::uint64_t seed = 0;
};

/// beta = 1 / (2 <|z_u - z_v|^2>) over all 8-neighbour pairs; 1 for a constant image.
double contrast_beta(const RasterPlane& image);
namespace reference {
double contrast_beta(const RasterPlane& image);
}

/// Smoothness weights gamma * exp(-beta |z_u - z_v|^2) / dist(u, v) for the
/// right, down, down-right and down-left neighbour of every pixel (0 where
/// the neighbour falls outside the image).
struct NeighborWeights {
  int width = 0;
  int height = 0;
  std::vector<double> right, down, down_right, down_left;
};
NeighborWeights neighbor_weights(const RasterPlane& image, double gamma, double beta);

/// Graph for one min-cut step: node i is pixel i; source side = foreground.
/// A pixel's source arc carries the cost of labelling it background and its
/// sink arc the cost of foreground (shifted per pixel so the smaller is 0).
/// Hard seeds get an arc larger than any finite cut on the side they are pinned to.
MaxFlowGraph build_graph(const RasterPlane& image, const TrimapSeed& trimap, const GmmModel& fg_gmm,
                         const GmmModel& bg_gmm, const NeighborWeights& weights);

/// Sum of per-pixel data terms (under the GMM of each pixel's label) and of
/// smoothness weights across label changes.
double grabcut_energy(const RasterPlane& image, const std::vector<std::uint8_t>& foreground, const GmmModel& fg_gmm,
                      const GmmModel& bg_gmm, const NeighborWeights& weights);

struct GrabCutResult {
  BinaryMask mask;
  std::vector<double> energy; // after each min-cut
  int iterations_run = 0;
  std::string diagnostic; // non-empty when the trimap was degenerate
};

/// Alternates GMM refits and min-cuts for params.iterations rounds or until
/// the labelling stops changing. Hard labels never flip. A trimap with too
/// few foreground or background pixels for the GMMs bypasses the iteration and
/// returns the hard foreground pixels.
GrabCutResult grabcut(const RasterPlane& image, const TrimapSeed& trimap, const GrabCutParams& params);

} // namespace coseg
