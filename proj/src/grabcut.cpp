#include "coseg/grabcut.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "coseg/errors.hpp"

namespace coseg {
namespace {

Color color_at(const RasterPlane& image, std::size_t i) {
  return {image.data[3 * i], image.data[3 * i + 1], image.data[3 * i + 2]};
}

double sq_diff(const RasterPlane& image, int x0, int y0, int x1, int y1) {
  double s = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double d = image.at(x0, y0, c) - image.at(x1, y1, c);
    s += d * d;
  }
  return s;
}

// Squared color differences of one row's forward neighbour pairs.
void row_contrast(const RasterPlane& image, int y, double& sum, std::size_t& count) {
  const int w = image.width, h = image.height;
  for (int x = 0; x < w; ++x) {
    if (x + 1 < w) {
      sum += sq_diff(image, x, y, x + 1, y);
      ++count;
    }
    if (y + 1 < h) {
      sum += sq_diff(image, x, y, x, y + 1);
      ++count;
      if (x + 1 < w) {
        sum += sq_diff(image, x, y, x + 1, y + 1);
        ++count;
      }
      if (x > 0) {
        sum += sq_diff(image, x, y, x - 1, y + 1);
        ++count;
      }
    }
  }
}

double beta_from(double sum, std::size_t count) {
  if (count == 0 || sum <= 0.0) {
    return 1.0;
  }
  return 1.0 / (2.0 * sum / static_cast<double>(count));
}

void check_image(const RasterPlane& image) {
  if (image.channels != 3 || image.empty()) {
    throw ArgumentError("grabcut expects a non-empty 3-channel image");
  }
}

std::vector<Color> colors_of(const RasterPlane& image) {
  std::vector<Color> out(image.pixel_count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = color_at(image, i);
  }
  return out;
}

std::vector<Color> select(const std::vector<Color>& colors, const std::vector<std::uint8_t>& fg, bool want_fg) {
  std::vector<Color> out;
  for (std::size_t i = 0; i < colors.size(); ++i) {
    if ((fg[i] != 0) == want_fg) {
      out.push_back(colors[i]);
    }
  }
  return out;
}

} // namespace

double contrast_beta(const RasterPlane& image) {
  check_image(image);
  // Per-row partial sums combined in row order so the result is thread-count independent.
  std::vector<double> sums(image.height, 0.0);
  std::vector<std::size_t> counts(image.height, 0);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < image.height; ++y) {
    row_contrast(image, y, sums[y], counts[y]);
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (int y = 0; y < image.height; ++y) {
    sum += sums[y];
    count += counts[y];
  }
  return beta_from(sum, count);
}

namespace reference {
double contrast_beta(const RasterPlane& image) {
  check_image(image);
  double sum = 0.0;
  std::size_t count = 0;
  for (int y = 0; y < image.height; ++y) {
    double row = 0.0;
    row_contrast(image, y, row, count);
    sum += row;
  }
  return beta_from(sum, count);
}
} // namespace reference

NeighborWeights neighbor_weights(const RasterPlane& image, double gamma, double beta) {
  check_image(image);
  if (!(gamma > 0.0)) {
    throw ArgumentError("grabcut gamma must be positive");
  }
  const int w = image.width, h = image.height;
  const std::size_t n = image.pixel_count();
  NeighborWeights nw{w, h, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                     std::vector<double>(n, 0.0)};
  const double diag = gamma / std::numbers::sqrt2;
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (x + 1 < w) {
        nw.right[i] = gamma * std::exp(-beta * sq_diff(image, x, y, x + 1, y));
      }
      if (y + 1 < h) {
        nw.down[i] = gamma * std::exp(-beta * sq_diff(image, x, y, x, y + 1));
        if (x + 1 < w) {
          nw.down_right[i] = diag * std::exp(-beta * sq_diff(image, x, y, x + 1, y + 1));
        }
        if (x > 0) {
          nw.down_left[i] = diag * std::exp(-beta * sq_diff(image, x, y, x - 1, y + 1));
        }
      }
    }
  }
  return nw;
}

MaxFlowGraph build_graph(const RasterPlane& image, const TrimapSeed& trimap, const GmmModel& fg_gmm,
                         const GmmModel& bg_gmm, const NeighborWeights& weights) {
  check_image(image);
  if (trimap.width != image.width || trimap.height != image.height || weights.width != image.width ||
      weights.height != image.height) {
    throw ArgumentError("build_graph: trimap or weights do not match the image");
  }
  if (fg_gmm.components.empty() || bg_gmm.components.empty()) {
    throw ArgumentError("build_graph: empty color model");
  }
  const int w = image.width, h = image.height;
  const std::size_t n = image.pixel_count();
  const auto colors = colors_of(image);
  const auto d_fg = data_terms(fg_gmm, colors);
  const auto d_bg = data_terms(bg_gmm, colors);

  // "Infinite" exceeds the cost of every labelling that honours the hard seeds.
  double bound = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    bound += std::abs(d_fg[i] - d_bg[i]) + weights.right[i] + weights.down[i] + weights.down_right[i] +
             weights.down_left[i];
  }

  MaxFlowGraph graph(static_cast<int>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const int u = static_cast<int>(i);
    switch (trimap.labels[i]) {
    case SeedLabel::HardForeground:
      graph.add_terminal_weights(u, bound, 0.0);
      break;
    case SeedLabel::HardBackground:
      graph.add_terminal_weights(u, 0.0, bound);
      break;
    default: {
      const double shift = std::min(d_fg[i], d_bg[i]);
      graph.add_terminal_weights(u, d_bg[i] - shift, d_fg[i] - shift);
    }
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const int u = static_cast<int>(i);
      if (x + 1 < w) {
        graph.add_edge(u, u + 1, weights.right[i], weights.right[i]);
      }
      if (y + 1 < h) {
        graph.add_edge(u, u + w, weights.down[i], weights.down[i]);
        if (x + 1 < w) {
          graph.add_edge(u, u + w + 1, weights.down_right[i], weights.down_right[i]);
        }
        if (x > 0) {
          graph.add_edge(u, u + w - 1, weights.down_left[i], weights.down_left[i]);
        }
      }
    }
  }
  return graph;
}

double grabcut_energy(const RasterPlane& image, const std::vector<std::uint8_t>& foreground, const GmmModel& fg_gmm,
                      const GmmModel& bg_gmm, const NeighborWeights& weights) {
  check_image(image);
  const int w = image.width, h = image.height;
  double e = 0.0;
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    const Color z = color_at(image, i);
    e += foreground[i] ? fg_gmm.data_term(z) : bg_gmm.data_term(z);
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const bool l = foreground[i] != 0;
      if (x + 1 < w && l != (foreground[i + 1] != 0)) {
        e += weights.right[i];
      }
      if (y + 1 < h) {
        if (l != (foreground[i + w] != 0)) {
          e += weights.down[i];
        }
        if (x + 1 < w && l != (foreground[i + w + 1] != 0)) {
          e += weights.down_right[i];
        }
        if (x > 0 && l != (foreground[i + w - 1] != 0)) {
          e += weights.down_left[i];
        }
      }
    }
  }
  return e;
}

GrabCutResult grabcut(const RasterPlane& image, const TrimapSeed& trimap, const GrabCutParams& params) {
  check_image(image);
  if (trimap.width != image.width || trimap.height != image.height) {
    throw ArgumentError("grabcut: trimap does not match the image");
  }
  if (params.iterations < 1 || params.components < 1) {
    throw ArgumentError("grabcut: iterations and components must be positive");
  }
  const std::size_t n = image.pixel_count();
  GrabCutResult result;
  result.mask = BinaryMask(image.width, image.height);

  std::vector<std::uint8_t> fg(n);
  std::size_t fg_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    fg[i] = is_foreground(trimap.labels[i]) ? 1 : 0;
    fg_count += fg[i];
  }
  const auto k = static_cast<std::size_t>(params.components);
  if (fg_count < k || n - fg_count < k) {
    for (std::size_t i = 0; i < n; ++i) {
      result.mask.bits[i] = trimap.labels[i] == SeedLabel::HardForeground ? 1 : 0;
    }
    result.diagnostic = "degenerate trimap: " + std::to_string(fg_count) + " foreground and " +
                        std::to_string(n - fg_count) + " background pixels for " + std::to_string(k) +
                        " components; returning hard foreground only";
    return result;
  }

  const auto colors = colors_of(image);
  const NeighborWeights weights = neighbor_weights(image, params.gamma, contrast_beta(image));
  GmmModel fg_gmm, bg_gmm;
  for (int iter = 0; iter < params.iterations; ++iter) {
    const auto fg_colors = select(colors, fg, true);
    const auto bg_colors = select(colors, fg, false);
    if (iter == 0) {
      fg_gmm = fit_gmm(fg_colors, params.components, params.seed);
      bg_gmm = fit_gmm(bg_colors, params.components, params.seed + 1);
    } else {
      // An emptied side keeps its previous model; no pixel's cost depends on it.
      fg_gmm = refine_gmm(fg_gmm, fg_colors);
      bg_gmm = refine_gmm(bg_gmm, bg_colors);
    }
    MaxFlowGraph graph = build_graph(image, trimap, fg_gmm, bg_gmm, weights);
    graph.solve();
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint8_t side = graph.is_source_side(static_cast<int>(i)) ? 1 : 0;
      changed = changed || side != fg[i];
      fg[i] = side;
    }
    result.energy.push_back(grabcut_energy(image, fg, fg_gmm, bg_gmm, weights));
    result.iterations_run = iter + 1;
    if (!changed && iter > 0) {
      break;
    }
  }
  result.mask.bits = fg;
  return result;
}

} // namespace coseg
