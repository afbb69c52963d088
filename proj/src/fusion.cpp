#include "coseg/fusion.hpp"

#include <algorithm>

#include "coseg/errors.hpp"

namespace coseg {
namespace {

void check_stack(const CandidateStack& stack, const RasterPlane& fallback) {
  if (stack.candidates.empty()) {
    throw ArgumentError("median_fuse: empty candidate stack for " + stack.key_id);
  }
  const RasterPlane& first = stack.candidates.front().values;
  for (const auto& c : stack.candidates) {
    if (!c.values.same_shape(first) || c.values.channels != 1 || c.valid.size() != first.pixel_count()) {
      throw ArgumentError("median_fuse: candidates differ in shape for " + stack.key_id);
    }
  }
  if (!fallback.same_shape(first)) {
    throw ArgumentError("median_fuse: fallback does not match the key frame for " + stack.key_id);
  }
}

// Median of buf[0..n) via selection; reorders buf.
inline double select_median(double* buf, std::size_t n) {
  const std::size_t mid = n / 2;
  std::nth_element(buf, buf + mid, buf + n);
  const double hi = buf[mid];
  if (n % 2 == 1) {
    return hi;
  }
  const double lo = *std::max_element(buf, buf + mid);
  return (lo + hi) / 2.0;
}

inline double fuse_pixel(const CandidateStack& stack, const RasterPlane& fallback, std::size_t p, double* buf) {
  std::size_t n = 0;
  for (const auto& c : stack.candidates) {
    if (c.valid[p]) {
      buf[n++] = c.values.data[p];
    }
  }
  return n == 0 ? fallback.data[p] : select_median(buf, n);
}

} // namespace

RasterPlane mean_of_sources(std::span<const RasterPlane> maps) {
  if (maps.empty()) {
    throw ArgumentError("mean_of_sources: no maps");
  }
  RasterPlane out(maps.front().width, maps.front().height, 1);
  for (const auto& m : maps) {
    if (!m.same_shape(out)) {
      throw ArgumentError("mean_of_sources: maps differ in shape");
    }
  }
  for (std::size_t p = 0; p < out.data.size(); ++p) {
    double s = 0.0;
    for (const auto& m : maps) {
      s += m.data[p];
    }
    out.data[p] = s / static_cast<double>(maps.size());
  }
  return out;
}

FusedMap median_fuse(const CandidateStack& stack, const RasterPlane& fallback) {
  check_stack(stack, fallback);
  const RasterPlane& first = stack.candidates.front().values;
  FusedMap out{RasterPlane(first.width, first.height, 1)};
  const auto n = static_cast<std::ptrdiff_t>(first.pixel_count());
#pragma omp parallel
  {
    std::vector<double> buf(stack.candidates.size());
#pragma omp for schedule(static)
    for (std::ptrdiff_t p = 0; p < n; ++p) {
      out.values.data[p] = fuse_pixel(stack, fallback, static_cast<std::size_t>(p), buf.data());
    }
  }
  return out;
}

namespace reference {

FusedMap median_fuse(const CandidateStack& stack, const RasterPlane& fallback) {
  check_stack(stack, fallback);
  const RasterPlane& first = stack.candidates.front().values;
  FusedMap out{RasterPlane(first.width, first.height, 1)};
  std::vector<double> buf(stack.candidates.size());
  for (std::size_t p = 0; p < first.pixel_count(); ++p) {
    out.values.data[p] = fuse_pixel(stack, fallback, p, buf.data());
  }
  return out;
}

} // namespace reference

FusedMap propagate_to_member(const FusedMap& key_fused, const FlowField& key_to_member,
                             const RasterPlane& member_fallback) {
  WarpedMap warped = warp_map(key_fused.values, key_to_member);
  if (!member_fallback.same_shape(warped.values)) {
    throw ArgumentError("propagate_to_member: fallback does not match the member frame");
  }
  for (std::size_t p = 0; p < warped.valid.size(); ++p) {
    if (!warped.valid[p]) {
      warped.values.data[p] = member_fallback.data[p];
    }
  }
  return {std::move(warped.values)};
}

std::map<std::string, FusedMap> fuse_sub_group(const SubGroup& sub_group, const SaliencySet& maps,
                                               const FlowStore& flows) {
  for (const auto& m : sub_group.members) {
    if (m != sub_group.key && !flows.find(sub_group.key, m)) {
      throw ConfigError("missing flow for pair " + sub_group.key + " -> " + m);
    }
  }
  CandidateStack stack{sub_group.key, warp_into_key(sub_group.members, maps, flows, sub_group.key)};
  std::map<std::string, FusedMap> out;
  const FusedMap key_fused = median_fuse(stack, mean_of_sources(maps.at(sub_group.key)));
  for (const auto& m : sub_group.members) {
    if (m == sub_group.key) {
      continue;
    }
    out.emplace(m, propagate_to_member(key_fused, *flows.find(sub_group.key, m), mean_of_sources(maps.at(m))));
  }
  out.emplace(sub_group.key, key_fused);
  return out;
}

} // namespace coseg
