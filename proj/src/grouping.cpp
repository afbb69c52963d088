#include "coseg/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <omp.h>

#include "coseg/errors.hpp"

namespace coseg {
namespace {

using Point = std::vector<double>;

double sq_dist(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Sorted copy of the features, validated for consistent finite dimensionality.
std::vector<FeatureVector> canonical(std::span<const FeatureVector> features) {
  if (features.empty()) {
    throw ArgumentError("no feature vectors supplied");
  }
  std::vector<FeatureVector> sorted(features.begin(), features.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const FeatureVector& a, const FeatureVector& b) { return a.image_id < b.image_id; });
  const std::size_t dim = sorted.front().values.size();
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i].values.size() != dim) {
      throw ArgumentError("feature dimension mismatch for " + sorted[i].image_id);
    }
    if (i > 0 && sorted[i].image_id == sorted[i - 1].image_id) {
      throw ArgumentError("duplicate image id " + sorted[i].image_id);
    }
    for (double v : sorted[i].values) {
      if (!std::isfinite(v)) {
        throw ArgumentError("non-finite feature value for " + sorted[i].image_id);
      }
    }
  }
  return sorted;
}

std::vector<Point> kmeanspp_init(const std::vector<FeatureVector>& pts, int k, std::mt19937_64& rng) {
  const std::size_t n = pts.size();
  std::vector<Point> centers;
  std::vector<bool> chosen(n, false);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::size_t first = pick(rng);
  centers.push_back(pts[first].values);
  chosen[first] = true;

  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    d2[i] = sq_dist(pts[i].values, centers[0]);
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (double d : d2) {
      total += d;
    }
    std::size_t next = n;
    if (total > 0.0) {
      double r = unit(rng) * total;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) {
          continue;
        }
        next = i;
        r -= d2[i];
        if (r < 0.0) {
          break;
        }
      }
    } else {
      // All remaining points coincide with a centre; take the first unused one.
      for (std::size_t i = 0; i < n && next == n; ++i) {
        if (!chosen[i]) {
          next = i;
        }
      }
    }
    chosen[next] = true;
    centers.push_back(pts[next].values);
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], sq_dist(pts[i].values, centers.back()));
    }
  }
  return centers;
}

void assign(const std::vector<FeatureVector>& pts, const std::vector<Point>& centers, std::vector<int>& labels) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (std::size_t c = 0; c < centers.size(); ++c) {
      const double d = sq_dist(pts[i].values, centers[c]);
      if (d < best) {
        best = d;
        arg = static_cast<int>(c);
      }
    }
    labels[i] = arg;
  }
}

void repair_empty(const std::vector<FeatureVector>& pts, const std::vector<Point>& centers, std::vector<int>& labels,
                  int k) {
  for (int c = 0; c < k; ++c) {
    std::vector<int> sizes(k, 0);
    for (int l : labels) {
      ++sizes[l];
    }
    if (sizes[c] > 0) {
      continue;
    }
    double far = -1.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (sizes[labels[i]] < 2) {
        continue;
      }
      const double d = sq_dist(pts[i].values, centers[labels[i]]);
      if (d > far) {
        far = d;
        arg = i;
      }
    }
    labels[arg] = c;
  }
}

std::vector<Point> update(const std::vector<FeatureVector>& pts, const std::vector<int>& labels, int k) {
  const std::size_t dim = pts.front().values.size();
  std::vector<Point> centers(k, Point(dim, 0.0));
  std::vector<int> sizes(k, 0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    ++sizes[labels[i]];
    for (std::size_t d = 0; d < dim; ++d) {
      centers[labels[i]][d] += pts[i].values[d];
    }
  }
  for (int c = 0; c < k; ++c) {
    for (double& v : centers[c]) {
      v /= sizes[c];
    }
  }
  return centers;
}

double total_sse(const std::vector<FeatureVector>& pts, const std::vector<Point>& centers,
                 const std::vector<int>& labels) {
  double s = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    s += sq_dist(pts[i].values, centers[labels[i]]);
  }
  return s;
}

// Renumbers clusters by first appearance in canonical order.
void canonicalize_labels(SubGrouping& g) {
  std::vector<int> remap(g.k, -1);
  int next = 0;
  for (int& l : g.labels) {
    if (remap[l] < 0) {
      remap[l] = next++;
    }
    l = remap[l];
  }
  std::vector<Point> centroids(g.k);
  for (int c = 0; c < g.k; ++c) {
    centroids[remap[c]] = std::move(g.centroids[c]);
  }
  g.centroids = std::move(centroids);
}

SubGrouping kmeans_sorted(const std::vector<FeatureVector>& pts, int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Point> centers = kmeanspp_init(pts, k, rng);
  std::vector<int> labels(pts.size(), -1);
  std::vector<int> previous;
  std::vector<double> history;
  for (int iter = 0; iter < 100; ++iter) {
    assign(pts, centers, labels);
    repair_empty(pts, centers, labels, k);
    if (labels == previous) {
      break;
    }
    centers = update(pts, labels, k);
    history.push_back(total_sse(pts, centers, labels));
    previous = labels;
  }

  SubGrouping g;
  g.k = k;
  for (const auto& p : pts) {
    g.image_ids.push_back(p.image_id);
  }
  g.labels = std::move(labels);
  g.centroids = std::move(centers);
  g.sse = total_sse(pts, g.centroids, g.labels);
  g.sse_history = std::move(history);
  canonicalize_labels(g);
  return g;
}

SubGrouping single_cluster(const std::vector<FeatureVector>& pts) {
  SubGrouping g;
  g.k = 1;
  for (const auto& p : pts) {
    g.image_ids.push_back(p.image_id);
  }
  g.labels.assign(pts.size(), 0);
  g.centroids = update(pts, g.labels, 1);
  g.sse = total_sse(pts, g.centroids, g.labels);
  g.sse_history = {g.sse};
  return g;
}

// Features aligned to the grouping's image order.
std::vector<const FeatureVector*> align(std::span<const FeatureVector> features, const SubGrouping& g) {
  std::map<std::string, const FeatureVector*> by_id;
  for (const auto& f : features) {
    by_id[f.image_id] = &f;
  }
  std::vector<const FeatureVector*> out;
  for (const auto& id : g.image_ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw ArgumentError("no feature vector for image " + id);
    }
    out.push_back(it->second);
  }
  return out;
}

} // namespace

int SubGrouping::label_of(const std::string& image_id) const {
  const auto it = std::lower_bound(image_ids.begin(), image_ids.end(), image_id);
  if (it == image_ids.end() || *it != image_id) {
    throw ArgumentError("image not in grouping: " + image_id);
  }
  return labels[static_cast<std::size_t>(it - image_ids.begin())];
}

std::vector<std::string> SubGrouping::members(int cluster) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < image_ids.size(); ++i) {
    if (labels[i] == cluster) {
      out.push_back(image_ids[i]);
    }
  }
  return out;
}

std::vector<SubGroup> SubGrouping::sub_groups() const {
  if (key_images.size() != static_cast<std::size_t>(k)) {
    throw ArgumentError("sub-grouping has no key images yet");
  }
  std::vector<SubGroup> out;
  for (int c = 0; c < k; ++c) {
    out.push_back({c, key_images[c], members(c)});
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> SubGrouping::required_pairs() const {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& sg : sub_groups()) {
    for (const auto& m : sg.members) {
      if (m != sg.key) {
        pairs.emplace_back(m, sg.key);
        pairs.emplace_back(sg.key, m);
      }
    }
  }
  return pairs;
}

FeatureVector fallback_features(const std::string& image_id, const RasterPlane& image) {
  if (image.channels != 3 || image.empty()) {
    throw ArgumentError("fallback_features expects a 3-channel image");
  }
  constexpr int kSide = 8;
  FeatureVector f{image_id, std::vector<double>(3 * kSide * kSide, 0.0)};
  // Exact area coverage of each source pixel by each of the 8x8 cells.
  auto overlap = [](double a0, double a1, double b0, double b1) { return std::max(0.0, std::min(a1, b1) - std::max(a0, b0)); };
  const double cw = static_cast<double>(image.width) / kSide;
  const double ch = static_cast<double>(image.height) / kSide;
  for (int cy = 0; cy < kSide; ++cy) {
    const double y0 = cy * ch, y1 = (cy + 1) * ch;
    for (int cx = 0; cx < kSide; ++cx) {
      const double x0 = cx * cw, x1 = (cx + 1) * cw;
      double acc[3] = {0.0, 0.0, 0.0};
      double area = 0.0;
      for (int y = static_cast<int>(std::floor(y0)); y < std::min(image.height, static_cast<int>(std::ceil(y1))); ++y) {
        const double wy = overlap(y, y + 1, y0, y1);
        for (int x = static_cast<int>(std::floor(x0)); x < std::min(image.width, static_cast<int>(std::ceil(x1))); ++x) {
          const double w = wy * overlap(x, x + 1, x0, x1);
          area += w;
          for (int c = 0; c < 3; ++c) {
            acc[c] += w * image.at(x, y, c);
          }
        }
      }
      for (int c = 0; c < 3; ++c) {
        f.values[c * kSide * kSide + cy * kSide + cx] = std::clamp(acc[c] / area, 0.0, 1.0);
      }
    }
  }
  return f;
}

std::vector<FeatureVector> load_features(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open feature file " + path);
  }
  std::vector<FeatureVector> out;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string name;
    if (!(ls >> name)) {
      continue;
    }
    FeatureVector f{image_id_from_path(name), {}};
    double v;
    while (ls >> v) {
      f.values.push_back(v);
    }
    if (!ls.eof()) {
      throw FormatError("non-numeric feature value for " + name + " in " + path);
    }
    out.push_back(std::move(f));
  }
  return out;
}

void save_features(const std::vector<FeatureVector>& features, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write " + path);
  }
  out.setf(std::ios::fixed);
  out.precision(6);
  for (const auto& f : features) {
    out << f.image_id;
    for (double v : f.values) {
      out << ' ' << v;
    }
    out << '\n';
  }
}

SubGrouping kmeans(std::span<const FeatureVector> features, int k, std::uint64_t seed) {
  const auto pts = canonical(features);
  if (k < 1 || static_cast<std::size_t>(k) > pts.size()) {
    throw ArgumentError("kmeans: k must be in [1, number of images]");
  }
  return kmeans_sorted(pts, k, seed);
}

double silhouette_score(std::span<const FeatureVector> features, const SubGrouping& grouping) {
  if (grouping.k < 2) {
    throw ArgumentError("silhouette needs at least two clusters");
  }
  const auto pts = align(features, grouping);
  const std::size_t n = pts.size();
  std::vector<int> sizes(grouping.k, 0);
  for (int l : grouping.labels) {
    ++sizes[l];
  }
  if (std::find(sizes.begin(), sizes.end(), 0) != sizes.end()) {
    throw ArgumentError("silhouette: empty cluster");
  }
  double total = 0.0;
  std::vector<double> sums(grouping.k);
  for (std::size_t i = 0; i < n; ++i) {
    const int own = grouping.labels[i];
    if (sizes[own] == 1) {
      continue;
    }
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) {
        sums[grouping.labels[j]] += std::sqrt(sq_dist(pts[i]->values, pts[j]->values));
      }
    }
    const double a = sums[own] / (sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < grouping.k; ++c) {
      if (c != own) {
        b = std::min(b, sums[c] / sizes[c]);
      }
    }
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(n);
}

KRange default_k_range(std::size_t group_size) {
  const int upper = static_cast<int>((group_size + 2) / 3);
  return {2, std::min(10, upper)};
}

SubGrouping select_k(std::span<const FeatureVector> features, int k_min, int k_max, std::uint64_t seed) {
  const auto pts = canonical(features);
  const int m = static_cast<int>(pts.size());
  if (m < 4) {
    return single_cluster(pts);
  }
  if (k_min < 2) {
    throw ArgumentError("select_k: k_min must be at least 2");
  }
  const int upper = std::min(k_max, m - 1);
  if (upper < k_min) {
    throw ArgumentError("select_k: empty K range [" + std::to_string(k_min) + ", " + std::to_string(upper) + "]");
  }
  const int count = upper - k_min + 1;
  std::vector<SubGrouping> best(count);
  std::vector<double> scores(count);

#pragma omp parallel for schedule(dynamic)
  for (int idx = 0; idx < count; ++idx) {
    const int k = k_min + idx;
    for (int r = 0; r < 5; ++r) {
      SubGrouping g = kmeans_sorted(pts, k, seed + static_cast<std::uint64_t>(r));
      if (r == 0 || g.sse < best[idx].sse) {
        best[idx] = std::move(g);
      }
    }
    scores[idx] = silhouette_score(pts, best[idx]);
  }

  int arg = 0;
  for (int idx = 1; idx < count; ++idx) {
    if (scores[idx] > scores[arg]) {
      arg = idx;
    }
  }
  return std::move(best[arg]);
}

SubGrouping pick_key_images(std::span<const FeatureVector> features, SubGrouping grouping) {
  const auto pts = align(features, grouping);
  grouping.key_images.assign(grouping.k, std::string());
  std::vector<double> best(grouping.k, std::numeric_limits<double>::infinity());
  // image_ids are sorted, so strict '<' keeps the smaller id on ties.
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const int c = grouping.labels[i];
    const double d = sq_dist(pts[i]->values, grouping.centroids[c]);
    if (d < best[c]) {
      best[c] = d;
      grouping.key_images[c] = grouping.image_ids[i];
    }
  }
  return grouping;
}

void save_grouping(const SubGrouping& grouping, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write " + path);
  }
  out << "K " << grouping.k << '\n';
  for (const auto& sg : grouping.sub_groups()) {
    out << "SUBGROUP " << sg.label + 1 << " KEY " << sg.key << '\n';
    for (const auto& m : sg.members) {
      out << "MEMBER " << sg.label + 1 << ' ' << m << '\n';
    }
  }
}

SubGrouping load_grouping(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open grouping manifest " + path);
  }
  std::map<int, std::string> keys;
  std::map<std::string, int> members;
  int declared_k = -1;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) {
      continue;
    }
    if (tag == "K") {
      ls >> declared_k;
    } else if (tag == "SUBGROUP") {
      int k;
      std::string kw, key;
      if (!(ls >> k >> kw >> key) || kw != "KEY") {
        throw FormatError("malformed SUBGROUP line in " + path);
      }
      keys[k] = key;
    } else if (tag == "MEMBER") {
      int k;
      std::string id;
      if (!(ls >> k >> id)) {
        throw FormatError("malformed MEMBER line in " + path);
      }
      members[id] = k;
    } else {
      throw FormatError("unknown record '" + tag + "' in " + path);
    }
  }
  SubGrouping g;
  g.k = static_cast<int>(keys.size());
  if (g.k == 0 || (declared_k >= 0 && declared_k != g.k)) {
    throw FormatError("inconsistent sub-group count in " + path);
  }
  for (int c = 1; c <= g.k; ++c) {
    if (!keys.count(c)) {
      throw FormatError("sub-group labels must be 1..K in " + path);
    }
    g.key_images.push_back(keys[c]);
  }
  for (const auto& [id, k] : members) {
    if (k < 1 || k > g.k) {
      throw FormatError("member " + id + " has unknown sub-group in " + path);
    }
    g.image_ids.push_back(id);
    g.labels.push_back(k - 1);
  }
  for (int c = 0; c < g.k; ++c) {
    const auto m = g.members(c);
    if (std::find(m.begin(), m.end(), g.key_images[c]) == m.end()) {
      throw FormatError("key image of sub-group " + std::to_string(c + 1) + " is not a member in " + path);
    }
  }
  return g;
}

} // namespace coseg
