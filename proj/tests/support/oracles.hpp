#pragma once

// Independent reference computations for tests. Nothing here calls into the
// implementation paths it is used to check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace oracle {

/// Direct bilinear evaluation at (sx, sy) with clamped neighbours.
inline double bilinear(const std::vector<double>& grid, int w, int h, double sx, double sy) {
  const int x0 = static_cast<int>(std::floor(sx));
  const int y0 = static_cast<int>(std::floor(sy));
  const double fx = sx - x0, fy = sy - y0;
  auto px = [&](int x, int y) {
    x = std::clamp(x, 0, w - 1);
    y = std::clamp(y, 0, h - 1);
    return grid[static_cast<std::size_t>(y) * w + x];
  };
  return (1 - fy) * ((1 - fx) * px(x0, y0) + fx * px(x0 + 1, y0)) +
         fy * ((1 - fx) * px(x0, y0 + 1) + fx * px(x0 + 1, y0 + 1));
}

/// Median by full sort; even counts average the two middle values.
inline double sorted_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

/// Smallest bin t maximizing the between-class variance w0*w1*(mu0-mu1)^2 of
/// the split {bins <= t} | {bins > t}, with bin values b/255 held as exact
/// rationals. Splits with an empty side score 0.
inline int otsu_brute_force(const std::array<std::uint64_t, 256>& hist) {
  using boost::multiprecision::cpp_rational;
  cpp_rational total_n = 0, total_s = 0;
  for (int b = 0; b < 256; ++b) {
    total_n += hist[b];
    total_s += cpp_rational(b, 255) * hist[b];
  }
  cpp_rational best = -1, n0 = 0, s0 = 0;
  int arg = -1;
  for (int t = 0; t < 256; ++t) {
    n0 += hist[t];
    s0 += cpp_rational(t, 255) * hist[t];
    const cpp_rational n1 = total_n - n0, s1 = total_s - s0;
    cpp_rational var = 0;
    if (n0 > 0 && n1 > 0) {
      const cpp_rational w0 = n0 / total_n, w1 = n1 / total_n;
      const cpp_rational diff = s0 / n0 - s1 / n1;
      var = w0 * w1 * diff * diff;
    }
    if (var > best) {
      best = var;
      arg = t;
    }
  }
  return arg;
}

struct Arc {
  int from;
  int to;
  double cap;
};

/// Minimum s-t cut by enumerating every side assignment of the inner nodes.
inline double brute_force_min_cut(int nodes, int s, int t, const std::vector<Arc>& arcs) {
  std::vector<int> inner;
  for (int v = 0; v < nodes; ++v) {
    if (v != s && v != t) {
      inner.push_back(v);
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << inner.size()); ++mask) {
    std::vector<bool> source_side(nodes, false);
    source_side[s] = true;
    for (std::size_t i = 0; i < inner.size(); ++i) {
      source_side[inner[i]] = (mask >> i) & 1u;
    }
    double cut = 0.0;
    for (const auto& a : arcs) {
      if (source_side[a.from] && !source_side[a.to]) {
        cut += a.cap;
      }
    }
    best = std::min(best, cut);
  }
  return best;
}

/// Mean silhouette by the two-loop definition (singletons score 0).
inline double silhouette(const std::vector<std::vector<double>>& pts, const std::vector<int>& labels, int k) {
  auto dist = [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t d = 0; d < pts[i].size(); ++d) {
      s += (pts[i][d] - pts[j][d]) * (pts[i][d] - pts[j][d]);
    }
    return std::sqrt(s);
  };
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::vector<double> sum(k, 0.0);
    std::vector<int> cnt(k, 0);
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j) {
        continue;
      }
      sum[labels[j]] += dist(i, j);
      ++cnt[labels[j]];
    }
    if (cnt[labels[i]] == 0) {
      continue;
    }
    const double a = sum[labels[i]] / cnt[labels[i]];
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (c != labels[i] && cnt[c] > 0) {
        b = std::min(b, sum[c] / cnt[c]);
      }
    }
    const double m = std::max(a, b);
    total += m > 0 ? (b - a) / m : 0.0;
  }
  return total / static_cast<double>(pts.size());
}

/// Within-cluster sum of squares of the best 2-partition of 1-D points.
inline std::vector<int> best_two_partition_1d(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> arg;
  for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
    std::vector<int> labels(n);
    double sum[2] = {0, 0};
    int cnt[2] = {0, 0};
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = (mask >> i) & 1u;
      sum[labels[i]] += xs[i];
      ++cnt[labels[i]];
    }
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double m = sum[labels[i]] / cnt[labels[i]];
      sse += (xs[i] - m) * (xs[i] - m);
    }
    if (sse < best) {
      best = sse;
      arg = labels;
    }
  }
  return arg;
}

} // namespace oracle
