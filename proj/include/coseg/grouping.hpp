#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "coseg/raster.hpp"

namespace coseg {

struct FeatureVector {
  std::string image_id;
  std::vector<double> values;
};

/// One sub-group: its key image and all members (key included), sorted by id.
struct SubGroup {
  int label = 0;
  std::string key;
  std::vector<std::string> members;
};

/// Cluster assignment of a group of images. Images are held in canonical
/// (sorted id) order; labels are 0-based internally and printed 1-based.
/// Cluster 0 is the one containing the first image, cluster 1 the one
/// containing the first image not in cluster 0, and so on.
struct SubGrouping {
  int k = 0;
  std::vector<std::string> image_ids;
  std::vector<int> labels;
  std::vector<std::vector<double>> centroids;
  std::vector<std::string> key_images; // empty until pick_key_images
  double sse = 0.0;
  std::vector<double> sse_history; // one entry per Lloyd update step

  int label_of(const std::string& image_id) const;
  std::vector<std::string> members(int cluster) const;
  std::vector<SubGroup> sub_groups() const;

  /// (member -> key) and (key -> member) for every non-key member.
  std::vector<std::pair<std::string, std::string>> required_pairs() const;
};

// 8x8 area-averaged thumbnail, channel planes concatenated (R block, G block, B block).
FeatureVector fallback_features(const std::string& image_id, const RasterPlane& image);

/// Text format: `<image_filename> <v1> ... <vD>` per line.
std::vector<FeatureVector> load_features(const std::string& path);
void save_features(const std::vector<FeatureVector>& features, const std::string& path);

/// Lloyd's algorithm with k-means++ seeding. Stops when assignments stop
/// changing or after 100 iterations; an emptied cluster is reseeded with the
/// point farthest from its current centroid.
SubGrouping kmeans(std::span<const FeatureVector> features, int k, std::uint64_t seed);

/// Mean silhouette with Euclidean distance. Singleton clusters contribute 0.
double silhouette_score(std::span<const FeatureVector> features, const SubGrouping& grouping);

struct KRange {
  int min = 2;
  int max = 10;
};
KRange default_k_range(std::size_t group_size);

/// Best-of-5 k-means per K in [k_min, min(k_max, m - 1)], then maximal
/// silhouette (ties to the smaller K). Groups of fewer than 4 images return K = 1.
SubGrouping select_k(std::span<const FeatureVector> features, int k_min, int k_max, std::uint64_t seed);

// Key image = member nearest the centroid; equal distances go to the smaller id.
SubGrouping pick_key_images(std::span<const FeatureVector> features, SubGrouping grouping);

// Run manifest: `K <n>`, then `SUBGROUP <k> KEY <image>` and `MEMBER <k> <image>` lines.
void save_grouping(const SubGrouping& grouping, const std::string& path);
SubGrouping load_grouping(const std::string& path);

} // namespace coseg
