#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "coseg/fusion.hpp"
#include "coseg/grabcut.hpp"
#include "coseg/grouping.hpp"

namespace coseg {

/// Flat key=value configuration. Keys use underscores; the matching CLI flag
/// is the same name with dashes (gc_iters <-> --gc-iters).
struct PipelineConfig {
  std::string input_dir;
  std::vector<std::string> saliency_dirs; // one per source; defines L and candidate order
  std::string flow_manifest;
  std::string features;   // optional feature file; fallback descriptor otherwise
  std::string output_dir;
  std::string grouping;   // fuse-stage input, default <output_dir>/grouping.txt
  std::string fused_dir;  // fuse-stage output / segment-stage input, default <output_dir>/fused
  std::string dump_fused; // optional directory for 8-bit fused maps
  int k_min = 0;          // 0: default range
  int k_max = 0;
  GrabCutParams grabcut;
  std::uint64_t seed = 0;

  std::string grouping_path() const;
  std::string fused_path() const;
};

/// Every recognised configuration key, in a stable order.
const std::vector<std::string>& config_keys();

/// Sets one key (dashes accepted in place of underscores). Throws ConfigError
/// for unknown keys or unparsable values.
void set_config_value(PipelineConfig& config, const std::string& key, const std::string& value);
PipelineConfig load_config(const std::string& path);

struct ImageEntry {
  std::string id;
  std::string path;
};

/// PNG/JPEG files directly inside dir, sorted by id.
std::vector<ImageEntry> list_images(const std::string& dir);

/// Sub-grouping with key images, from the feature file or fallback descriptors.
SubGrouping cluster_images(const PipelineConfig& config, const std::vector<ImageEntry>& images);

/// Otsu seeds followed by GrabCut on one image.
BinaryMask segment_image(const RasterPlane& image, const RasterPlane& fused, const GrabCutParams& params);

struct RunSummary {
  SubGrouping grouping;
  std::map<std::string, BinaryMask> masks;
  std::map<std::string, RasterPlane> fused;
};

/// Whole pipeline. Inputs are validated (and every result computed) before
/// anything is written; a validation failure throws ConfigError and leaves
/// output_dir untouched. Writes grouping.txt, required_pairs.txt and one
/// <id>.png mask per image.
RunSummary run_pipeline(const PipelineConfig& config);

// Staged equivalents; each consumes the previous stage's files.
SubGrouping run_cluster_stage(const PipelineConfig& config);
std::map<std::string, RasterPlane> run_fuse_stage(const PipelineConfig& config);
std::map<std::string, BinaryMask> run_segment_stage(const PipelineConfig& config);

} // namespace coseg
