#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "coseg/grouping.hpp"
#include "coseg/warp.hpp"

namespace coseg {

/// All candidate maps aligned to one key image.
struct CandidateStack {
  std::string key_id;
  std::vector<WarpedMap> candidates;
};

struct FusedMap {
  RasterPlane values;
};

/// Per-pixel mean of an image's own source maps; the fallback wherever no
/// correspondence survives.
RasterPlane mean_of_sources(std::span<const RasterPlane> maps);

/// Per-pixel median over the valid candidates (even count: mean of the two
/// middle values). Pixels with no valid candidate take `fallback`.
FusedMap median_fuse(const CandidateStack& stack, const RasterPlane& fallback);

namespace reference {
FusedMap median_fuse(const CandidateStack& stack, const RasterPlane& fallback);
}

/// Warps the key's fused map into a member frame; invalid pixels take the
/// member's own mean saliency.
FusedMap propagate_to_member(const FusedMap& key_fused, const FlowField& key_to_member,
                             const RasterPlane& member_fallback);

/// Fused map for every member of the sub-group (key by median, others by propagation).
std::map<std::string, FusedMap> fuse_sub_group(const SubGroup& sub_group, const SaliencySet& maps,
                                               const FlowStore& flows);

} // namespace coseg
