#include "coseg/raster_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "coseg/errors.hpp"

namespace fs = std::filesystem;

namespace coseg {
namespace {

constexpr float kFloTag = 202021.25f;

enum class Container { Png, Jpeg, Unknown };

std::vector<unsigned char> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path);
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Container sniff(const std::vector<unsigned char>& bytes) {
  static constexpr unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), png_sig, 8) == 0) {
    return Container::Png;
  }
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) {
    return Container::Jpeg;
  }
  return Container::Unknown;
}

cv::Mat decode(const std::string& path, int flags, bool png_only) {
  const auto bytes = read_bytes(path);
  const Container kind = sniff(bytes);
  if (kind == Container::Unknown || (png_only && kind != Container::Png)) {
    throw FormatError("unsupported image format: " + path);
  }
  cv::Mat mat = cv::imdecode(bytes, flags);
  if (mat.empty()) {
    throw IoError("failed to decode (truncated or corrupt) " + path);
  }
  return mat;
}

void write_png(const cv::Mat& mat, const std::string& path) {
  std::vector<unsigned char> buf;
  if (!cv::imencode(".png", mat, buf)) {
    throw IoError("failed to encode " + path);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write " + path);
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) {
    throw IoError("short write to " + path);
  }
}

template <typename T>
T read_le(const unsigned char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    auto* b = reinterpret_cast<unsigned char*>(&v);
    std::reverse(b, b + sizeof(T));
  }
  return v;
}

template <typename T>
void write_le(std::ostream& out, T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto* b = reinterpret_cast<unsigned char*>(&v);
    std::reverse(b, b + sizeof(T));
  }
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

cv::Mat to_gray_mat(const RasterPlane& plane, double scale, int type) {
  if (plane.channels != 1) {
    throw ArgumentError("expected a single-channel plane");
  }
  cv::Mat mat(plane.height, plane.width, type);
  for (int y = 0; y < plane.height; ++y) {
    for (int x = 0; x < plane.width; ++x) {
      const double v = std::lround(std::clamp(plane.at(x, y), 0.0, 1.0) * scale);
      if (type == CV_16UC1) {
        mat.at<std::uint16_t>(y, x) = static_cast<std::uint16_t>(v);
      } else {
        mat.at<std::uint8_t>(y, x) = static_cast<std::uint8_t>(v);
      }
    }
  }
  return mat;
}

} // namespace

RasterPlane load_image(const std::string& path) {
  const cv::Mat bgr = decode(path, cv::IMREAD_COLOR, false);
  RasterPlane out(bgr.cols, bgr.rows, 3);
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) {
      out.at(x, y, 0) = row[x][2] / 255.0;
      out.at(x, y, 1) = row[x][1] / 255.0;
      out.at(x, y, 2) = row[x][0] / 255.0;
    }
  }
  return out;
}

void save_image(const RasterPlane& image, const std::string& path) {
  if (image.channels != 3) {
    throw ArgumentError("save_image expects 3 channels");
  }
  cv::Mat bgr(image.height, image.width, CV_8UC3);
  for (int y = 0; y < image.height; ++y) {
    auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < image.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        row[x][2 - c] = static_cast<std::uint8_t>(std::lround(std::clamp(image.at(x, y, c), 0.0, 1.0) * 255.0));
      }
    }
  }
  write_png(bgr, path);
}

RasterPlane resample_bilinear(const RasterPlane& plane, int target_w, int target_h) {
  if (target_w <= 0 || target_h <= 0 || plane.empty()) {
    throw ArgumentError("resample_bilinear: empty source or target");
  }
  if (target_w == plane.width && target_h == plane.height) {
    return plane;
  }
  auto coord = [](int i, int dst, int src) {
    if (dst == 1) {
      return 0.5 * (src - 1);
    }
    return static_cast<double>(i) * (src - 1) / (dst - 1);
  };
  RasterPlane out(target_w, target_h, plane.channels);
  for (int y = 0; y < target_h; ++y) {
    const double sy = coord(y, target_h, plane.height);
    const int y0 = std::min(static_cast<int>(std::floor(sy)), plane.height - 1);
    const int y1 = std::min(y0 + 1, plane.height - 1);
    const double fy = sy - y0;
    for (int x = 0; x < target_w; ++x) {
      const double sx = coord(x, target_w, plane.width);
      const int x0 = std::min(static_cast<int>(std::floor(sx)), plane.width - 1);
      const int x1 = std::min(x0 + 1, plane.width - 1);
      const double fx = sx - x0;
      for (int c = 0; c < plane.channels; ++c) {
        const double top = (1.0 - fx) * plane.at(x0, y0, c) + fx * plane.at(x1, y0, c);
        const double bottom = (1.0 - fx) * plane.at(x0, y1, c) + fx * plane.at(x1, y1, c);
        const double lo = std::min({plane.at(x0, y0, c), plane.at(x1, y0, c), plane.at(x0, y1, c), plane.at(x1, y1, c)});
        const double hi = std::max({plane.at(x0, y0, c), plane.at(x1, y0, c), plane.at(x0, y1, c), plane.at(x1, y1, c)});
        out.at(x, y, c) = std::clamp((1.0 - fy) * top + fy * bottom, lo, hi);
      }
    }
  }
  return out;
}

RasterPlane load_saliency(const std::string& path, int target_w, int target_h) {
  const cv::Mat mat = decode(path, cv::IMREAD_UNCHANGED, true);
  if (mat.channels() != 1) {
    throw FormatError("saliency map must be single-channel: " + path);
  }
  double scale = 0.0;
  if (mat.depth() == CV_8U) {
    scale = 255.0;
  } else if (mat.depth() == CV_16U) {
    scale = 65535.0;
  } else {
    throw FormatError("saliency map must be 8- or 16-bit: " + path);
  }
  RasterPlane plane(mat.cols, mat.rows, 1);
  for (int y = 0; y < mat.rows; ++y) {
    for (int x = 0; x < mat.cols; ++x) {
      const double raw = mat.depth() == CV_8U ? mat.at<std::uint8_t>(y, x) : mat.at<std::uint16_t>(y, x);
      plane.at(x, y) = raw / scale;
    }
  }
  return resample_bilinear(plane, target_w, target_h);
}

void save_gray16(const RasterPlane& plane, const std::string& path) {
  write_png(to_gray_mat(plane, 65535.0, CV_16UC1), path);
}

void save_gray8(const RasterPlane& plane, const std::string& path) {
  write_png(to_gray_mat(plane, 255.0, CV_8UC1), path);
}

RasterPlane quantize16(RasterPlane plane) {
  for (double& v : plane.data) {
    v = static_cast<double>(std::lround(std::clamp(v, 0.0, 1.0) * 65535.0)) / 65535.0;
  }
  return plane;
}

FlowField load_flow(const std::string& path) {
  const auto bytes = read_bytes(path);
  if (bytes.size() < 12) {
    throw FormatError("flow file too short: " + path);
  }
  if (read_le<float>(bytes.data()) != kFloTag) {
    throw FormatError("bad .flo magic number: " + path);
  }
  const auto w = read_le<std::int32_t>(bytes.data() + 4);
  const auto h = read_le<std::int32_t>(bytes.data() + 8);
  if (w < 1 || h < 1 || w > 99999 || h > 99999) {
    throw FormatError("illegal .flo dimensions in " + path);
  }
  const std::size_t n = static_cast<std::size_t>(w) * h;
  if (bytes.size() != 12 + n * 8) {
    throw FormatError("size mismatch in .flo file " + path);
  }
  FlowField flow;
  flow.width = w;
  flow.height = h;
  flow.source_width = w;
  flow.source_height = h;
  flow.du.resize(n);
  flow.dv.resize(n);
  const unsigned char* p = bytes.data() + 12;
  for (std::size_t i = 0; i < n; ++i, p += 8) {
    flow.du[i] = read_le<float>(p);
    flow.dv[i] = read_le<float>(p + 4);
  }
  return flow;
}

FlowField load_flow(const std::string& path, int source_w, int source_h) {
  FlowField flow = load_flow(path);
  flow.source_width = source_w;
  flow.source_height = source_h;
  return flow;
}

void save_flow(const FlowField& flow, const std::string& path) {
  if (flow.du.size() != flow.pixel_count() || flow.dv.size() != flow.pixel_count() || flow.width < 1 ||
      flow.height < 1) {
    throw ArgumentError("save_flow: malformed flow field");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write " + path);
  }
  write_le<float>(out, kFloTag);
  write_le<std::int32_t>(out, flow.width);
  write_le<std::int32_t>(out, flow.height);
  for (std::size_t i = 0; i < flow.pixel_count(); ++i) {
    write_le<float>(out, flow.du[i]);
    write_le<float>(out, flow.dv[i]);
  }
  if (!out) {
    throw IoError("short write to " + path);
  }
}

void save_mask(const BinaryMask& mask, const std::string& path) {
  cv::Mat mat(mask.height, mask.width, CV_8UC1);
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      mat.at<std::uint8_t>(y, x) = mask.at(x, y) ? 255 : 0;
    }
  }
  write_png(mat, path);
}

BinaryMask load_mask(const std::string& path) {
  const cv::Mat mat = decode(path, cv::IMREAD_GRAYSCALE | cv::IMREAD_ANYDEPTH, false);
  BinaryMask mask(mat.cols, mat.rows);
  for (int y = 0; y < mat.rows; ++y) {
    for (int x = 0; x < mat.cols; ++x) {
      const bool fg = mat.depth() == CV_16U ? mat.at<std::uint16_t>(y, x) != 0 : mat.at<std::uint8_t>(y, x) != 0;
      mask.set(x, y, fg);
    }
  }
  return mask;
}

PairManifest PairManifest::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open pair manifest " + path);
  }
  const fs::path base = fs::path(path).parent_path();
  PairManifest manifest;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') {
      continue;
    }
    std::istringstream ls(line);
    std::string src, dst, flo;
    PairEntry e;
    if (!(ls >> src >> dst >> flo >> e.source_width >> e.source_height)) {
      throw FormatError(path + ":" + std::to_string(line_no) + ": expected '<source> <target> <flo> <w> <h>'");
    }
    e.source = image_id_from_path(src);
    e.target = image_id_from_path(dst);
    const fs::path flo_path(flo);
    e.flo_path = flo_path.is_absolute() ? flo : (base / flo_path).string();
    manifest.add(std::move(e));
  }
  return manifest;
}

void PairManifest::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write " + path);
  }
  const fs::path base = fs::path(path).parent_path();
  for (const auto& e : entries_) {
    std::string flo = e.flo_path;
    if (!base.empty()) {
      flo = fs::path(e.flo_path).lexically_relative(base).string();
      if (flo.empty()) {
        flo = e.flo_path;
      }
    }
    out << e.source << ' ' << e.target << ' ' << flo << ' ' << e.source_width << ' ' << e.source_height << '\n';
  }
}

void PairManifest::add(PairEntry entry) {
  auto key = std::make_pair(entry.source, entry.target);
  if (auto it = index_.find(key); it != index_.end()) {
    entries_[it->second] = std::move(entry);
    return;
  }
  index_.emplace(std::move(key), entries_.size());
  entries_.push_back(std::move(entry));
}

const PairEntry* PairManifest::find(const std::string& source, const std::string& target) const {
  const auto it = index_.find({source, target});
  return it == index_.end() ? nullptr : &entries_[it->second];
}

void FlowStore::insert(const std::string& source, const std::string& target, FlowField flow) {
  flows_.insert_or_assign({source, target}, std::move(flow));
}

const FlowField* FlowStore::find(const std::string& source, const std::string& target) const {
  const auto it = flows_.find({source, target});
  return it == flows_.end() ? nullptr : &it->second;
}

FlowStore FlowStore::from_manifest(const PairManifest& manifest,
                                   const std::vector<std::pair<std::string, std::string>>& pairs) {
  std::string missing;
  for (const auto& [src, dst] : pairs) {
    if (!manifest.find(src, dst)) {
      missing += "\n  " + src + " -> " + dst;
    }
  }
  if (!missing.empty()) {
    throw ConfigError("pair manifest lacks required flows:" + missing);
  }
  FlowStore store;
  for (const auto& [src, dst] : pairs) {
    const PairEntry* e = manifest.find(src, dst);
    store.insert(src, dst, load_flow(e->flo_path, e->source_width, e->source_height));
  }
  return store;
}

} // namespace coseg
