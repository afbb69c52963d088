#include "coseg/warp.hpp"

#include <algorithm>
#include <cmath>

#include "coseg/errors.hpp"

namespace coseg {
namespace {

void check_shapes(const RasterPlane& source, const FlowField& flow) {
  if (source.channels != 1) {
    throw ArgumentError("warp_map expects a single-channel map");
  }
  if (source.width != flow.source_width || source.height != flow.source_height) {
    throw ArgumentError("warp_map: map is " + std::to_string(source.width) + "x" + std::to_string(source.height) +
                        " but the flow's source frame is " + std::to_string(flow.source_width) + "x" +
                        std::to_string(flow.source_height));
  }
  if (flow.du.size() != flow.pixel_count() || flow.dv.size() != flow.pixel_count()) {
    throw ArgumentError("warp_map: malformed flow field");
  }
}

// Samples one target pixel; returns false when the correspondence is unusable.
inline bool sample(const RasterPlane& src, const FlowField& flow, int x, int y, double& out) {
  const std::size_t i = static_cast<std::size_t>(y) * flow.width + x;
  if (flow.is_unknown(i)) {
    return false;
  }
  const double sx = x + static_cast<double>(flow.du[i]);
  const double sy = y + static_cast<double>(flow.dv[i]);
  if (sx < -0.5 || sx > src.width - 0.5 || sy < -0.5 || sy > src.height - 0.5) {
    return false;
  }
  const double fx0 = std::floor(sx);
  const double fy0 = std::floor(sy);
  const double fx = sx - fx0;
  const double fy = sy - fy0;
  const int x0 = std::clamp(static_cast<int>(fx0), 0, src.width - 1);
  const int x1 = std::clamp(static_cast<int>(fx0) + 1, 0, src.width - 1);
  const int y0 = std::clamp(static_cast<int>(fy0), 0, src.height - 1);
  const int y1 = std::clamp(static_cast<int>(fy0) + 1, 0, src.height - 1);
  const double a = src.at(x0, y0), b = src.at(x1, y0), c = src.at(x0, y1), d = src.at(x1, y1);
  const double top = (1.0 - fx) * a + fx * b;
  const double bottom = (1.0 - fx) * c + fx * d;
  out = std::clamp((1.0 - fy) * top + fy * bottom, std::min({a, b, c, d}), std::max({a, b, c, d}));
  return true;
}

WarpedMap blank(const FlowField& flow) {
  return {RasterPlane(flow.width, flow.height, 1), std::vector<std::uint8_t>(flow.pixel_count(), 0)};
}

} // namespace

WarpedMap WarpedMap::all_valid(RasterPlane values) {
  WarpedMap w{std::move(values), {}};
  w.valid.assign(w.values.pixel_count(), 1);
  return w;
}

WarpedMap warp_map(const RasterPlane& source, const FlowField& flow) {
  check_shapes(source, flow);
  WarpedMap out = blank(flow);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < flow.height; ++y) {
    for (int x = 0; x < flow.width; ++x) {
      double v = 0.0;
      if (sample(source, flow, x, y, v)) {
        const std::size_t i = static_cast<std::size_t>(y) * flow.width + x;
        out.values.data[i] = v;
        out.valid[i] = 1;
      }
    }
  }
  return out;
}

namespace reference {

WarpedMap warp_map(const RasterPlane& source, const FlowField& flow) {
  check_shapes(source, flow);
  WarpedMap out = blank(flow);
  for (int y = 0; y < flow.height; ++y) {
    for (int x = 0; x < flow.width; ++x) {
      double v = 0.0;
      if (sample(source, flow, x, y, v)) {
        out.values.at(x, y) = v;
        out.valid[static_cast<std::size_t>(y) * flow.width + x] = 1;
      }
    }
  }
  return out;
}

} // namespace reference

std::vector<WarpedMap> warp_into_key(const std::vector<std::string>& members, const SaliencySet& maps,
                                     const FlowStore& flows, const std::string& key_id) {
  std::vector<std::string> ordered = members;
  std::sort(ordered.begin(), ordered.end());
  for (const auto& id : ordered) {
    if (id != key_id && !flows.find(id, key_id)) {
      throw ConfigError("missing flow for pair " + id + " -> " + key_id);
    }
    if (!maps.count(id)) {
      throw ConfigError("no saliency maps loaded for " + id);
    }
  }
  std::vector<WarpedMap> out;
  for (const auto& id : ordered) {
    for (const RasterPlane& map : maps.at(id)) {
      if (id == key_id) {
        out.push_back(WarpedMap::all_valid(map));
      } else {
        out.push_back(warp_map(map, *flows.find(id, key_id)));
      }
    }
  }
  return out;
}

} // namespace coseg
