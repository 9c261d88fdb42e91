#pragma once

// Data-parallel inner loops. Each kernel has a serial reference and an OpenMP
// variant; both write per-item results into caller-owned storage so the two
// produce bit-identical output regardless of thread count.

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

namespace hola::kernels {

/// A Gaussian component prepared for density evaluation.
struct GaussianTerm {
  double log_weight = 0.0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd chol;  // lower Cholesky factor of the covariance
  double log_det = 0.0;  // log det(covariance)
};

/// log N(x; mean, L L^T)
double log_gaussian(const Eigen::Ref<const Eigen::VectorXd>& x, const GaussianTerm& term);

/// E-step over the columns of `points` (dimension x count).
///
/// Writes responsibilities into `resp` (components x count) and the per-point
/// log mixture density into `point_log_density` (length count).
void estep_serial(const Eigen::MatrixXd& points, std::span<const GaussianTerm> terms,
                  Eigen::MatrixXd& resp, std::span<double> point_log_density);
void estep_parallel(const Eigen::MatrixXd& points, std::span<const GaussianTerm> terms,
                    Eigen::MatrixXd& resp, std::span<double> point_log_density);

/// Non-dominated sorting of the rows of `costs` (trials x objectives, every
/// column minimized). Returns the 1-based Pareto level of each row.
std::vector<int> pareto_levels_serial(const Eigen::MatrixXd& costs);
std::vector<int> pareto_levels_parallel(const Eigen::MatrixXd& costs);

/// Strict Pareto dominance of row `a` over row `b` (all columns minimized).
bool dominates(const Eigen::MatrixXd& costs, Eigen::Index a, Eigen::Index b);

}  // namespace hola::kernels
