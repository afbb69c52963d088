#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "coseg/raster.hpp"

namespace coseg {

// PNG or JPEG, returned as 3-channel RGB scaled to [0,1].
RasterPlane load_image(const std::string& path);
void save_image(const RasterPlane& image, const std::string& path);

/// Loads a single-channel 8- or 16-bit PNG saliency map and resamples it
/// bilinearly (corner-aligned) to target_w x target_h.
RasterPlane load_saliency(const std::string& path, int target_w, int target_h);

/// Corner-aligned bilinear resampling: output pixel x maps to source
/// coordinate x * (src_w - 1) / (dst_w - 1). A 1-pixel axis samples the centre.
RasterPlane resample_bilinear(const RasterPlane& plane, int target_w, int target_h);

// Single-channel maps written losslessly enough for stage hand-off (1/65535 steps).
void save_gray16(const RasterPlane& plane, const std::string& path);
void save_gray8(const RasterPlane& plane, const std::string& path);

/// Rounds every value to the nearest multiple of 1/65535, the precision of save_gray16.
RasterPlane quantize16(RasterPlane plane);

// Middlebury .flo. Source dimensions default to the target dimensions.
FlowField load_flow(const std::string& path);
FlowField load_flow(const std::string& path, int source_w, int source_h);
void save_flow(const FlowField& flow, const std::string& path);

// 8-bit gray PNG, foreground 255. Loading treats any nonzero value as foreground.
void save_mask(const BinaryMask& mask, const std::string& path);
BinaryMask load_mask(const std::string& path);

struct PairEntry {
  std::string source;
  std::string target;
  std::string flo_path; // resolved against the manifest's directory
  int source_width = 0;
  int source_height = 0;
};

/// Text file, one line per ordered pair:
///   <source_image> <target_image> <flo_path> <source_w> <source_h>
/// Image names are normalized to image ids (stems).
class PairManifest {
public:
  PairManifest() = default;
  static PairManifest load(const std::string& path);
  void save(const std::string& path) const;

  void add(PairEntry entry);
  const PairEntry* find(const std::string& source, const std::string& target) const;
  const std::vector<PairEntry>& entries() const { return entries_; }

private:
  std::vector<PairEntry> entries_;
  std::map<std::pair<std::string, std::string>, std::size_t> index_;
};

/// Flow fields keyed by (source id, target id).
class FlowStore {
public:
  void insert(const std::string& source, const std::string& target, FlowField flow);
  const FlowField* find(const std::string& source, const std::string& target) const;
  std::size_t size() const { return flows_.size(); }

  /// Loads exactly the listed pairs from the manifest; throws ConfigError naming
  /// every pair that is missing from it.
  static FlowStore from_manifest(const PairManifest& manifest,
                                 const std::vector<std::pair<std::string, std::string>>& pairs);

private:
  std::map<std::pair<std::string, std::string>, FlowField> flows_;
};

} // namespace coseg
