#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace coseg {

/// Row-major H x W grid with 1 or 3 interleaved channels, values in [0,1].
/// Images, saliency maps and fused maps all live in this container.
struct RasterPlane {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> data;

  RasterPlane() = default;
  RasterPlane(int w, int h, int c, double fill = 0.0);

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  bool empty() const { return data.empty(); }

  double& at(int x, int y, int c = 0) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  double at(int x, int y, int c = 0) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }

  bool same_shape(const RasterPlane& other) const {
    return width == other.width && height == other.height && channels == other.channels;
  }
};

/// Throws ArgumentError unless the plane satisfies its size and [0,1] range invariants.
void validate(const RasterPlane& plane);

struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits; // 1 = foreground

  BinaryMask() = default;
  BinaryMask(int w, int h, bool fill = false);

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
  std::size_t count() const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

// Displacements above this magnitude mark "no correspondence" (Middlebury convention).
inline constexpr float kUnknownFlowThreshold = 1e9f;
inline constexpr float kUnknownFlow = 1e10f;

/// Backward displacement field: target pixel (x, y) corresponds to source
/// location (x + du, y + dv). width/height describe the target frame.
struct FlowField {
  int width = 0;
  int height = 0;
  int source_width = 0;
  int source_height = 0;
  std::vector<float> du;
  std::vector<float> dv;

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  bool is_unknown(std::size_t i) const {
    return !(std::abs(du[i]) <= kUnknownFlowThreshold) || !(std::abs(dv[i]) <= kUnknownFlowThreshold);
  }

  static FlowField constant(int w, int h, float du, float dv, int source_w, int source_h);
  static FlowField identity(int w, int h) { return constant(w, h, 0.0f, 0.0f, w, h); }

  friend bool operator==(const FlowField&, const FlowField&) = default;
};

/// Image identifier used throughout: the file name without directory or extension.
std::string image_id_from_path(const std::string& path);

} // namespace coseg
