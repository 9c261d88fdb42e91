#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "hola/kernels.hpp"
#include "hola/lowdisc.hpp"

namespace hola {

struct MixtureComponent {
  double weight = 1.0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

/// Gaussian mixture over the standardized search space.
class MixtureModel {
 public:
  /// Validates weights (positive, summing to 1) and covariances (SPD).
  explicit MixtureModel(std::vector<MixtureComponent> components);

  std::size_t size() const { return components_.size(); }
  std::size_t dimension() const { return static_cast<std::size_t>(components_.front().mean.size()); }
  const std::vector<MixtureComponent>& components() const { return components_; }
  std::span<const kernels::GaussianTerm> terms() const { return terms_; }

  double log_density(const Eigen::VectorXd& x) const;
  /// Sum over columns of `points` of log sum_j w_j N(x; m_j, C_j).
  double log_likelihood(const Eigen::MatrixXd& points) const;

  /// Component chosen by one uniform draw u in [0, 1): the first j whose
  /// cumulative weight exceeds u. Zero-weight components are never chosen.
  std::size_t select_component(double u) const;

  /// Pseudo-random draw: one uniform for the component, then N(0, I) through
  /// the component's Cholesky factor.
  Eigen::VectorXd sample(std::mt19937_64& rng) const;
  /// Gauss-Sobol draw: one uniform from `rng` selects the component, the
  /// Gaussian part comes from the next point of `stream`.
  Eigen::VectorXd sample(std::mt19937_64& rng, SobolStream& stream) const;

 private:
  std::vector<MixtureComponent> components_;
  std::vector<kernels::GaussianTerm> terms_;
  std::vector<GaussTransform> transforms_;
  std::vector<double> cumulative_;
};

struct FitOptions {
  int max_components = 3;
  std::uint64_t seed = 0;
  /// Lower bound on every covariance eigenvalue.
  double covariance_floor = 1e-6;
  /// Stop when the relative log-likelihood gain drops below this.
  double tolerance = 1e-8;
  int max_iterations = 200;
  /// A c-component model is only considered with >= points_per_parameter * n * c points.
  int points_per_parameter = 5;
  bool parallel = true;
  /// Called with (components, iteration, log-likelihood) after every E-step.
  std::function<void(int, int, double)> on_iteration;
};

/// EM fit with BIC selection over 1..max_components.
///
/// `points` holds one point per column. Throws std::invalid_argument for
/// fewer than two points.
MixtureModel fit_mixture(const Eigen::MatrixXd& points, const FitOptions& options = {});

/// Convenience overload taking one std::vector per point.
MixtureModel fit_mixture(std::span<const std::vector<double>> points,
                         const FitOptions& options = {});

/// Closed-form single Gaussian: sample mean and population covariance with
/// eigenvalues clipped at `floor`.
MixtureComponent fit_single_gaussian(const Eigen::MatrixXd& points, double floor);

/// Bayesian information criterion of `model` on `points`.
double bic(const MixtureModel& model, const Eigen::MatrixXd& points);

}  // namespace hola
