#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace coseg {

using Color = Eigen::Vector3d;

inline constexpr double kCovarianceRegularization = 1e-6;

/// One weighted Gaussian. `cost` is the per-pixel energy of explaining a
/// color with this component:
///   -log w + 1/2 log|S| + 1/2 (z-m)^T S^-1 (z-m) + eps/2 tr(S^-1) + 3/2 log(2 pi)
/// The eps term is the prior whose minimizer is the regularized covariance
/// (sample covariance + eps I), so refitting never raises the energy.
struct GaussianComponent {
  double weight = 0.0;
  Color mean = Color::Zero();
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Identity();

  double cost(const Color& z) const {
    const Color d = z - mean;
    return offset_ + 0.5 * d.dot(inverse_ * d);
  }

  void finalize(); // caches inverse and constant terms

private:
  Eigen::Matrix3d inverse_ = Eigen::Matrix3d::Identity();
  double offset_ = 0.0;
};

class GmmModel {
public:
  std::vector<GaussianComponent> components;

  std::size_t size() const { return components.size(); }
  // Lowest cost over components; ties go to the lower index.
  int best_component(const Color& z) const;
  double data_term(const Color& z) const;
};

/// k-means++ seeding on the colors, nearest-centre assignment, then
/// `em_iterations` rounds of hard max-likelihood assignment and refit.
/// Components that end up empty are dropped; weights are member fractions.
GmmModel fit_gmm(std::span<const Color> colors, int component_count, std::uint64_t seed, int em_iterations = 3);

/// Assign-then-refit steps starting from an existing model. Never increases
/// the summed data term over `colors`.
GmmModel refine_gmm(const GmmModel& model, std::span<const Color> colors, int steps = 1);

std::vector<double> data_terms(const GmmModel& model, std::span<const Color> colors);
namespace reference {
std::vector<double> data_terms(const GmmModel& model, std::span<const Color> colors);
}

} // namespace coseg
