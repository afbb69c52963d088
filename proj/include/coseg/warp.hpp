#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "coseg/raster.hpp"
#include "coseg/raster_io.hpp"

namespace coseg {

/// Single-channel map in the target frame plus a per-pixel validity bit.
/// Invalid pixels hold 0.
struct WarpedMap {
  RasterPlane values;
  std::vector<std::uint8_t> valid;

  static WarpedMap all_valid(RasterPlane values);
};

/// Per-image saliency maps, one plane per source, in source order.
using SaliencySet = std::map<std::string, std::vector<RasterPlane>>;

/// Backward bilinear warp: target pixel p samples source at p + flow(p).
/// A sample is valid when the displacement is not the unknown sentinel and the
/// sample point lies in [-0.5, W-0.5] x [-0.5, H-0.5]; the four-neighbour fetch
/// is clamped to the image.
WarpedMap warp_map(const RasterPlane& source, const FlowField& flow);

namespace reference {
WarpedMap warp_map(const RasterPlane& source, const FlowField& flow);
}

/// Aligns every member's maps into the key frame. The key's own maps enter
/// unwarped. Output order: members by id, then source index.
std::vector<WarpedMap> warp_into_key(const std::vector<std::string>& members, const SaliencySet& maps,
                                     const FlowStore& flows, const std::string& key_id);

} // namespace coseg
