#include "coseg/raster.hpp"

#include <algorithm>
#include <filesystem>

#include "coseg/errors.hpp"

namespace coseg {

RasterPlane::RasterPlane(int w, int h, int c, double fill)
    : width(w), height(h), channels(c) {
  if (w < 0 || h < 0 || (c != 1 && c != 3)) {
    throw ArgumentError("RasterPlane: invalid shape " + std::to_string(w) + "x" + std::to_string(h) +
                        "x" + std::to_string(c));
  }
  data.assign(static_cast<std::size_t>(w) * h * c, fill);
}

void validate(const RasterPlane& plane) {
  if (plane.channels != 1 && plane.channels != 3) {
    throw ArgumentError("RasterPlane: channels must be 1 or 3");
  }
  if (plane.data.size() != plane.pixel_count() * plane.channels) {
    throw ArgumentError("RasterPlane: data length does not match shape");
  }
  for (double v : plane.data) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ArgumentError("RasterPlane: value outside [0,1]");
    }
  }
}

BinaryMask::BinaryMask(int w, int h, bool fill) : width(w), height(h) {
  if (w < 0 || h < 0) {
    throw ArgumentError("BinaryMask: negative size");
  }
  bits.assign(static_cast<std::size_t>(w) * h, fill ? 1 : 0);
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count_if(bits.begin(), bits.end(), [](std::uint8_t b) { return b != 0; }));
}

FlowField FlowField::constant(int w, int h, float du, float dv, int source_w, int source_h) {
  FlowField f;
  f.width = w;
  f.height = h;
  f.source_width = source_w;
  f.source_height = source_h;
  f.du.assign(f.pixel_count(), du);
  f.dv.assign(f.pixel_count(), dv);
  return f;
}

std::string image_id_from_path(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

} // namespace coseg
