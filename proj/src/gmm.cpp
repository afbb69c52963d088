#include "coseg/gmm.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "coseg/errors.hpp"

namespace coseg {
namespace {

std::vector<int> assign_by_cost(const GmmModel& model, std::span<const Color> colors) {
  std::vector<int> labels(colors.size());
  const auto n = static_cast<std::ptrdiff_t>(colors.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    labels[i] = model.best_component(colors[i]);
  }
  return labels;
}

// Maximum-likelihood parameters for a fixed assignment (covariance regularized).
GmmModel estimate(std::span<const Color> colors, const std::vector<int>& labels, int k) {
  std::vector<std::size_t> counts(k, 0);
  std::vector<Color> sums(k, Color::Zero());
  for (std::size_t i = 0; i < colors.size(); ++i) {
    ++counts[labels[i]];
    sums[labels[i]] += colors[i];
  }
  std::vector<Color> means(k);
  for (int c = 0; c < k; ++c) {
    means[c] = counts[c] ? Color(sums[c] / static_cast<double>(counts[c])) : Color::Zero();
  }
  std::vector<Eigen::Matrix3d> scatter(k, Eigen::Matrix3d::Zero());
  for (std::size_t i = 0; i < colors.size(); ++i) {
    const Color d = colors[i] - means[labels[i]];
    scatter[labels[i]] += d * d.transpose();
  }
  GmmModel model;
  const double n = static_cast<double>(colors.size());
  for (int c = 0; c < k; ++c) {
    if (counts[c] == 0) {
      continue;
    }
    GaussianComponent g;
    g.weight = static_cast<double>(counts[c]) / n;
    g.mean = means[c];
    g.covariance = scatter[c] / static_cast<double>(counts[c]) +
                   kCovarianceRegularization * Eigen::Matrix3d::Identity();
    g.finalize();
    model.components.push_back(g);
  }
  return model;
}

std::vector<Color> kmeanspp(std::span<const Color> colors, int k, std::mt19937_64& rng) {
  std::vector<Color> centers;
  std::uniform_int_distribution<std::size_t> pick(0, colors.size() - 1);
  centers.push_back(colors[pick(rng)]);
  std::vector<double> d2(colors.size());
  for (std::size_t i = 0; i < colors.size(); ++i) {
    d2[i] = (colors[i] - centers[0]).squaredNorm();
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (double d : d2) {
      total += d;
    }
    if (total <= 0.0) {
      break; // every color coincides with a centre
    }
    double r = unit(rng) * total;
    std::size_t next = 0;
    for (std::size_t i = 0; i < colors.size(); ++i) {
      if (d2[i] <= 0.0) {
        continue;
      }
      next = i;
      r -= d2[i];
      if (r < 0.0) {
        break;
      }
    }
    centers.push_back(colors[next]);
    for (std::size_t i = 0; i < colors.size(); ++i) {
      d2[i] = std::min(d2[i], (colors[i] - centers.back()).squaredNorm());
    }
  }
  return centers;
}

} // namespace

void GaussianComponent::finalize() {
  inverse_ = covariance.inverse();
  offset_ = -std::log(weight) + 0.5 * std::log(covariance.determinant()) +
            0.5 * kCovarianceRegularization * inverse_.trace() + 1.5 * std::log(2.0 * std::numbers::pi);
}

int GmmModel::best_component(const Color& z) const {
  int arg = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < components.size(); ++c) {
    const double v = components[c].cost(z);
    if (v < best) {
      best = v;
      arg = static_cast<int>(c);
    }
  }
  return arg;
}

double GmmModel::data_term(const Color& z) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : components) {
    best = std::min(best, c.cost(z));
  }
  return best;
}

GmmModel fit_gmm(std::span<const Color> colors, int component_count, std::uint64_t seed, int em_iterations) {
  if (colors.empty()) {
    throw ArgumentError("fit_gmm: no colors");
  }
  if (component_count < 1) {
    throw ArgumentError("fit_gmm: component_count must be positive");
  }
  const int k = std::min<int>(component_count, static_cast<int>(colors.size()));
  std::mt19937_64 rng(seed);
  const std::vector<Color> centers = kmeanspp(colors, k, rng);

  std::vector<int> labels(colors.size());
  for (std::size_t i = 0; i < colors.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.size(); ++c) {
      const double d = (colors[i] - centers[c]).squaredNorm();
      if (d < best) {
        best = d;
        labels[i] = static_cast<int>(c);
      }
    }
  }
  GmmModel model = estimate(colors, labels, static_cast<int>(centers.size()));
  return refine_gmm(model, colors, em_iterations);
}

GmmModel refine_gmm(const GmmModel& model, std::span<const Color> colors, int steps) {
  if (colors.empty() || model.components.empty()) {
    return model;
  }
  GmmModel current = model;
  for (int s = 0; s < steps; ++s) {
    const auto labels = assign_by_cost(current, colors);
    current = estimate(colors, labels, static_cast<int>(current.size()));
  }
  return current;
}

std::vector<double> data_terms(const GmmModel& model, std::span<const Color> colors) {
  std::vector<double> out(colors.size());
  const auto n = static_cast<std::ptrdiff_t>(colors.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = model.data_term(colors[i]);
  }
  return out;
}

namespace reference {
std::vector<double> data_terms(const GmmModel& model, std::span<const Color> colors) {
  std::vector<double> out;
  out.reserve(colors.size());
  for (const auto& z : colors) {
    out.push_back(model.data_term(z));
  }
  return out;
}
} // namespace reference

} // namespace coseg
