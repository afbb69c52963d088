#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coseg/raster.hpp"

namespace coseg {

/// |pred & gt| / |pred | gt|; two empty masks score 1.
double jaccard(const BinaryMask& pred, const BinaryMask& gt);

/// Fraction of pixels where pred and gt agree (pixel accuracy).
double precision(const BinaryMask& pred, const BinaryMask& gt);

struct DatasetImage {
  std::string id;
  std::string image_path;
  std::optional<BinaryMask> ground_truth; // empty for unlabeled (noise) images
};

struct DatasetGroup {
  std::string name;
  std::string directory;
  std::vector<DatasetImage> images; // sorted by id
};

struct Dataset {
  std::vector<DatasetGroup> groups; // sorted by class name
  std::vector<std::string> warnings;
};

/// One group per class sub-directory of root. Ground truth lives in
/// <class>/GT/<same basename>.*, nonzero = foreground. Missing or unreadable
/// ground truth leaves the image unlabeled (with a warning for unreadable files).
Dataset load_dataset(const std::string& root);

struct ImageScore {
  std::string group;
  std::string image;
  double jaccard = 0.0;
  double precision = 0.0;
};

struct ScoreReport {
  std::vector<ImageScore> per_image;
  std::map<std::string, std::pair<double, double>> per_class; // (mean J, mean P)
  std::pair<double, double> overall{0.0, 0.0};                 // mean of class means
  std::pair<double, double> micro{0.0, 0.0};                   // mean over images
  std::vector<std::string> missing;                            // "<class> <image>"

  bool complete() const { return missing.empty(); }
};

/// Macro/micro aggregation of a per-image table.
ScoreReport aggregate(std::vector<ImageScore> per_image);

/// Scores predictions found at <preds>/<class>/<id>.png, or <preds>/<id>.png.
ScoreReport score(const std::string& preds_dir, const Dataset& dataset);

/// Lines file: `<class> <image> <J> <P>` rows, then `OVERALL <J> <P>` and
/// `MICRO <J> <P>`, plus `MISSING <class> <image>` rows.
std::string format_score_lines(const ScoreReport& report);
std::string format_score_table(const ScoreReport& report);

/// Shortest round-trip decimal form, always with a decimal point.
std::string format_real(double v);

} // namespace coseg
