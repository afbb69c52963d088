#include "coseg/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "coseg/errors.hpp"
#include "coseg/raster_io.hpp"

namespace fs = std::filesystem;

namespace coseg {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto res = std::from_chars(value.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError("invalid value '" + value + "' for " + key);
  }
  return out;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (auto t = trim(item); !t.empty()) {
      out.push_back(t);
    }
  }
  return out;
}

std::string find_map(const std::string& dir, const std::string& id) {
  const fs::path p = fs::path(dir) / (id + ".png");
  return fs::exists(p) ? p.string() : std::string();
}

// Runs body(i) for i in [0, n) across threads; rethrows the first failure.
template <typename Body>
void parallel_for_each(std::ptrdiff_t n, Body&& body) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
}

struct LoadedGroup {
  std::vector<ImageEntry> images;
  std::map<std::string, RasterPlane> pixels;
};

LoadedGroup load_images(const PipelineConfig& config) {
  if (config.input_dir.empty()) {
    throw ConfigError("input_dir is not set");
  }
  LoadedGroup g;
  g.images = list_images(config.input_dir);
  std::vector<RasterPlane> planes(g.images.size());
  parallel_for_each(static_cast<std::ptrdiff_t>(g.images.size()),
                    [&](std::ptrdiff_t i) { planes[i] = load_image(g.images[i].path); });
  for (std::size_t i = 0; i < planes.size(); ++i) {
    g.pixels.emplace(g.images[i].id, std::move(planes[i]));
  }
  return g;
}

void require_output_dir(const PipelineConfig& config) {
  if (config.output_dir.empty()) {
    throw ConfigError("output_dir is not set");
  }
}

// Checks that all L maps exist for every image, then loads them at image size.
SaliencySet load_saliency_set(const PipelineConfig& config, const LoadedGroup& group) {
  if (config.saliency_dirs.empty()) {
    throw ConfigError("saliency_dirs is empty; at least one saliency source is required");
  }
  std::string missing;
  for (const auto& img : group.images) {
    for (const auto& dir : config.saliency_dirs) {
      if (find_map(dir, img.id).empty()) {
        missing += "\n  " + (fs::path(dir) / (img.id + ".png")).string();
      }
    }
  }
  if (!missing.empty()) {
    throw ConfigError("missing saliency maps:" + missing);
  }
  const std::size_t n = group.images.size();
  std::vector<std::vector<RasterPlane>> maps(n);
  parallel_for_each(static_cast<std::ptrdiff_t>(n), [&](std::ptrdiff_t i) {
    const auto& img = group.images[i];
    const RasterPlane& pixels = group.pixels.at(img.id);
    for (const auto& dir : config.saliency_dirs) {
      maps[i].push_back(load_saliency(find_map(dir, img.id), pixels.width, pixels.height));
    }
  });
  SaliencySet set;
  for (std::size_t i = 0; i < n; ++i) {
    set.emplace(group.images[i].id, std::move(maps[i]));
  }
  return set;
}

FlowStore load_required_flows(const PipelineConfig& config, const SubGrouping& grouping, const LoadedGroup& group) {
  const auto pairs = grouping.required_pairs();
  if (pairs.empty()) {
    return {};
  }
  if (config.flow_manifest.empty()) {
    throw ConfigError("flow_manifest is not set but " + std::to_string(pairs.size()) + " flows are required");
  }
  const PairManifest manifest = PairManifest::load(config.flow_manifest);
  std::string problems;
  for (const auto& [src, dst] : pairs) {
    const PairEntry* e = manifest.find(src, dst);
    if (!e) {
      problems += "\n  missing pair " + src + " -> " + dst;
    } else if (!fs::exists(e->flo_path)) {
      problems += "\n  missing flow file " + e->flo_path;
    }
  }
  if (!problems.empty()) {
    throw ConfigError("flow manifest " + config.flow_manifest + " is incomplete:" + problems);
  }
  FlowStore store;
  try {
    store = FlowStore::from_manifest(manifest, pairs);
  } catch (const FormatError& e) {
    throw ConfigError(e.what());
  }
  for (const auto& [src, dst] : pairs) {
    const FlowField& f = *store.find(src, dst);
    const RasterPlane& s = group.pixels.at(src);
    const RasterPlane& t = group.pixels.at(dst);
    if (f.width != t.width || f.height != t.height || f.source_width != s.width || f.source_height != s.height) {
      throw ConfigError("flow " + src + " -> " + dst + " has frame " + std::to_string(f.source_width) + "x" +
                        std::to_string(f.source_height) + " -> " + std::to_string(f.width) + "x" +
                        std::to_string(f.height) + ", images are " + std::to_string(s.width) + "x" +
                        std::to_string(s.height) + " and " + std::to_string(t.width) + "x" +
                        std::to_string(t.height));
    }
  }
  return store;
}

void check_grouping_covers(const SubGrouping& grouping, const LoadedGroup& group) {
  std::set<std::string> ids(grouping.image_ids.begin(), grouping.image_ids.end());
  for (const auto& img : group.images) {
    if (!ids.erase(img.id)) {
      throw ConfigError("grouping manifest does not list image " + img.id);
    }
  }
  if (!ids.empty()) {
    throw ConfigError("grouping manifest lists unknown image " + *ids.begin());
  }
}

// Fused maps at stage hand-off precision, so staged and monolithic runs agree.
std::map<std::string, RasterPlane> fuse_all(const SubGrouping& grouping, const SaliencySet& maps,
                                            const FlowStore& flows) {
  const auto groups = grouping.sub_groups();
  std::vector<std::map<std::string, FusedMap>> parts(groups.size());
  parallel_for_each(static_cast<std::ptrdiff_t>(groups.size()),
                    [&](std::ptrdiff_t k) { parts[k] = fuse_sub_group(groups[k], maps, flows); });
  std::map<std::string, RasterPlane> out;
  for (auto& part : parts) {
    for (auto& [id, fused] : part) {
      out.emplace(id, quantize16(std::move(fused.values)));
    }
  }
  return out;
}

std::map<std::string, BinaryMask> segment_all(const PipelineConfig& config, const LoadedGroup& group,
                                              const std::map<std::string, RasterPlane>& fused) {
  const std::size_t n = group.images.size();
  std::vector<BinaryMask> masks(n);
  parallel_for_each(static_cast<std::ptrdiff_t>(n), [&](std::ptrdiff_t i) {
    GrabCutParams params = config.grabcut;
    params.seed = config.seed + static_cast<std::uint64_t>(i);
    const auto& id = group.images[i].id;
    masks[i] = segment_image(group.pixels.at(id), fused.at(id), params);
  });
  std::map<std::string, BinaryMask> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.emplace(group.images[i].id, std::move(masks[i]));
  }
  return out;
}

void write_required_pairs(const SubGrouping& grouping, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write " + path);
  }
  for (const auto& [src, dst] : grouping.required_pairs()) {
    out << src << ' ' << dst << '\n';
  }
}

void write_fused_debug(const std::string& dir, const std::map<std::string, RasterPlane>& fused) {
  if (dir.empty()) {
    return;
  }
  fs::create_directories(dir);
  for (const auto& [id, map] : fused) {
    save_gray8(map, (fs::path(dir) / (id + ".png")).string());
  }
}

} // namespace

std::string PipelineConfig::grouping_path() const {
  return grouping.empty() ? (fs::path(output_dir) / "grouping.txt").string() : grouping;
}

std::string PipelineConfig::fused_path() const {
  return fused_dir.empty() ? (fs::path(output_dir) / "fused").string() : fused_dir;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "input_dir", "saliency_dirs", "flow_manifest", "features",      "output_dir",    "grouping",
      "fused_dir", "dump_fused",    "k_min",         "k_max",         "gc_iters",      "gc_gamma",
      "gc_components", "seed"};
  return keys;
}

void set_config_value(PipelineConfig& c, const std::string& raw_key, const std::string& raw_value) {
  std::string key = trim(raw_key);
  std::replace(key.begin(), key.end(), '-', '_');
  const std::string value = trim(raw_value);
  if (key == "input_dir") {
    c.input_dir = value;
  } else if (key == "saliency_dirs") {
    c.saliency_dirs = split_list(value);
  } else if (key == "flow_manifest") {
    c.flow_manifest = value;
  } else if (key == "features") {
    c.features = value;
  } else if (key == "output_dir") {
    c.output_dir = value;
  } else if (key == "grouping") {
    c.grouping = value;
  } else if (key == "fused_dir") {
    c.fused_dir = value;
  } else if (key == "dump_fused") {
    c.dump_fused = value;
  } else if (key == "k_min") {
    c.k_min = parse_number<int>(key, value);
  } else if (key == "k_max") {
    c.k_max = parse_number<int>(key, value);
  } else if (key == "gc_iters") {
    c.grabcut.iterations = parse_number<int>(key, value);
  } else if (key == "gc_gamma") {
    c.grabcut.gamma = parse_number<double>(key, value);
  } else if (key == "gc_components") {
    c.grabcut.components = parse_number<int>(key, value);
  } else if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(key, value);
  } else {
    throw ConfigError("unknown configuration key '" + raw_key + "'");
  }
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config " + path);
  }
  PipelineConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') {
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    set_config_value(config, t.substr(0, eq), t.substr(eq + 1));
  }
  return config;
}

std::vector<ImageEntry> list_images(const std::string& dir) {
  if (!fs::is_directory(dir)) {
    throw ConfigError("input directory does not exist: " + dir);
  }
  std::vector<ImageEntry> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) {
      continue;
    }
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") {
      out.push_back({e.path().stem().string(), e.path().string()});
    }
  }
  if (out.empty()) {
    throw ConfigError("no PNG/JPEG images in " + dir);
  }
  std::sort(out.begin(), out.end(), [](const ImageEntry& a, const ImageEntry& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].id == out[i - 1].id) {
      throw ConfigError("two images share the id " + out[i].id + " in " + dir);
    }
  }
  return out;
}

namespace {

SubGrouping cluster_loaded(const PipelineConfig& config, const LoadedGroup& group) {
  std::vector<FeatureVector> features;
  if (!config.features.empty()) {
    std::map<std::string, FeatureVector> by_id;
    for (auto& f : load_features(config.features)) {
      by_id[f.image_id] = std::move(f);
    }
    std::string missing;
    for (const auto& img : group.images) {
      auto it = by_id.find(img.id);
      if (it == by_id.end()) {
        missing += "\n  " + img.id;
      } else {
        features.push_back(it->second);
      }
    }
    if (!missing.empty()) {
      throw ConfigError("feature file " + config.features + " lacks images:" + missing);
    }
  } else {
    for (const auto& img : group.images) {
      features.push_back(fallback_features(img.id, group.pixels.at(img.id)));
    }
  }
  const KRange range = default_k_range(features.size());
  const int k_min = config.k_min > 0 ? config.k_min : range.min;
  const int k_max = config.k_max > 0 ? config.k_max : range.max;
  SubGrouping grouping;
  try {
    grouping = select_k(features, k_min, k_max, config.seed);
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("clustering: ") + e.what());
  }
  return pick_key_images(features, std::move(grouping));
}

} // namespace

SubGrouping cluster_images(const PipelineConfig& config, const std::vector<ImageEntry>& images) {
  LoadedGroup group;
  group.images = images;
  for (const auto& img : images) {
    group.pixels.emplace(img.id, load_image(img.path));
  }
  return cluster_loaded(config, group);
}

BinaryMask segment_image(const RasterPlane& image, const RasterPlane& fused, const GrabCutParams& params) {
  const TrimapSeed seeds = seeds_from_otsu(fused, otsu_threshold(fused));
  GrabCutResult r = grabcut(image, seeds, params);
  if (!r.diagnostic.empty()) {
    std::clog << "grabcut: " << r.diagnostic << '\n';
  }
  return std::move(r.mask);
}

RunSummary run_pipeline(const PipelineConfig& config) {
  require_output_dir(config);
  const LoadedGroup group = load_images(config);
  const SaliencySet maps = load_saliency_set(config, group);
  RunSummary summary;
  summary.grouping = cluster_loaded(config, group);
  const FlowStore flows = load_required_flows(config, summary.grouping, group);

  summary.fused = fuse_all(summary.grouping, maps, flows);
  summary.masks = segment_all(config, group, summary.fused);

  fs::create_directories(config.output_dir);
  save_grouping(summary.grouping, (fs::path(config.output_dir) / "grouping.txt").string());
  write_required_pairs(summary.grouping, (fs::path(config.output_dir) / "required_pairs.txt").string());
  for (const auto& [id, mask] : summary.masks) {
    save_mask(mask, (fs::path(config.output_dir) / (id + ".png")).string());
  }
  write_fused_debug(config.dump_fused, summary.fused);
  return summary;
}

SubGrouping run_cluster_stage(const PipelineConfig& config) {
  require_output_dir(config);
  const LoadedGroup group = load_images(config);
  SubGrouping grouping = cluster_loaded(config, group);
  fs::create_directories(config.output_dir);
  save_grouping(grouping, (fs::path(config.output_dir) / "grouping.txt").string());
  write_required_pairs(grouping, (fs::path(config.output_dir) / "required_pairs.txt").string());
  return grouping;
}

std::map<std::string, RasterPlane> run_fuse_stage(const PipelineConfig& config) {
  require_output_dir(config);
  const LoadedGroup group = load_images(config);
  const SaliencySet maps = load_saliency_set(config, group);
  SubGrouping grouping;
  try {
    grouping = load_grouping(config.grouping_path());
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  check_grouping_covers(grouping, group);
  const FlowStore flows = load_required_flows(config, grouping, group);
  auto fused = fuse_all(grouping, maps, flows);

  const std::string dir = config.fused_path();
  fs::create_directories(dir);
  for (const auto& [id, map] : fused) {
    save_gray16(map, (fs::path(dir) / (id + ".png")).string());
  }
  write_fused_debug(config.dump_fused, fused);
  return fused;
}

std::map<std::string, BinaryMask> run_segment_stage(const PipelineConfig& config) {
  require_output_dir(config);
  const LoadedGroup group = load_images(config);
  const std::string dir = config.fused_path();
  std::string missing;
  for (const auto& img : group.images) {
    if (find_map(dir, img.id).empty()) {
      missing += "\n  " + (fs::path(dir) / (img.id + ".png")).string();
    }
  }
  if (!missing.empty()) {
    throw ConfigError("missing fused maps:" + missing);
  }
  std::map<std::string, RasterPlane> fused;
  for (const auto& img : group.images) {
    const RasterPlane& pixels = group.pixels.at(img.id);
    fused.emplace(img.id, load_saliency(find_map(dir, img.id), pixels.width, pixels.height));
  }
  auto masks = segment_all(config, group, fused);
  fs::create_directories(config.output_dir);
  for (const auto& [id, mask] : masks) {
    save_mask(mask, (fs::path(config.output_dir) / (id + ".png")).string());
  }
  return masks;
}

} // namespace coseg
