#include "hola/kernels.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace hola::kernels {
namespace {

void check_estep_shapes(const Eigen::MatrixXd& points, std::span<const GaussianTerm> terms,
                        Eigen::MatrixXd& resp, std::span<double> point_log_density) {
  const auto count = points.cols();
  if (terms.empty()) throw std::invalid_argument("estep: no components");
  if (static_cast<Eigen::Index>(point_log_density.size()) != count) {
    throw std::invalid_argument("estep: log-density buffer has wrong length");
  }
  resp.resize(static_cast<Eigen::Index>(terms.size()), count);
}

// Responsibilities and log-density for a single point via log-sum-exp.
inline void estep_point(const Eigen::MatrixXd& points, std::span<const GaussianTerm> terms,
                        Eigen::MatrixXd& resp, std::span<double> out, Eigen::Index i) {
  const auto c = static_cast<Eigen::Index>(terms.size());
  double peak = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < c; ++j) {
    const double v = terms[j].log_weight + log_gaussian(points.col(i), terms[j]);
    resp(j, i) = v;
    peak = std::max(peak, v);
  }
  double sum = 0.0;
  for (Eigen::Index j = 0; j < c; ++j) {
    resp(j, i) = std::exp(resp(j, i) - peak);
    sum += resp(j, i);
  }
  for (Eigen::Index j = 0; j < c; ++j) resp(j, i) /= sum;
  out[static_cast<std::size_t>(i)] = peak + std::log(sum);
}

}  // namespace

double log_gaussian(const Eigen::Ref<const Eigen::VectorXd>& x, const GaussianTerm& term) {
  const Eigen::VectorXd w =
      term.chol.triangularView<Eigen::Lower>().solve(x - term.mean);
  const double n = static_cast<double>(x.size());
  return -0.5 * (n * std::log(2.0 * std::numbers::pi) + term.log_det + w.squaredNorm());
}

void estep_serial(const Eigen::MatrixXd& points, std::span<const GaussianTerm> terms,
                  Eigen::MatrixXd& resp, std::span<double> point_log_density) {
  check_estep_shapes(points, terms, resp, point_log_density);
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    estep_point(points, terms, resp, point_log_density, i);
  }
}

void estep_parallel(const Eigen::MatrixXd& points, std::span<const GaussianTerm> terms,
                    Eigen::MatrixXd& resp, std::span<double> point_log_density) {
  check_estep_shapes(points, terms, resp, point_log_density);
  const Eigen::Index count = points.cols();
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < count; ++i) {
    estep_point(points, terms, resp, point_log_density, i);
  }
}

bool dominates(const Eigen::MatrixXd& costs, Eigen::Index a, Eigen::Index b) {
  bool strictly = false;
  for (Eigen::Index k = 0; k < costs.cols(); ++k) {
    if (costs(a, k) > costs(b, k)) return false;
    if (costs(a, k) < costs(b, k)) strictly = true;
  }
  return strictly;
}

std::vector<int> pareto_levels_serial(const Eigen::MatrixXd& costs) {
  const Eigen::Index count = costs.rows();
  std::vector<int> level(static_cast<std::size_t>(count), 0);
  Eigen::Index assigned = 0;
  for (int current = 1; assigned < count; ++current) {
    std::vector<Eigen::Index> front;
    for (Eigen::Index i = 0; i < count; ++i) {
      if (level[i] != 0) continue;
      bool dominated = false;
      for (Eigen::Index j = 0; j < count && !dominated; ++j) {
        if (j != i && level[j] == 0 && dominates(costs, j, i)) dominated = true;
      }
      if (!dominated) front.push_back(i);
    }
    for (auto i : front) level[i] = current;
    assigned += static_cast<Eigen::Index>(front.size());
  }
  return level;
}

std::vector<int> pareto_levels_parallel(const Eigen::MatrixXd& costs) {
  const Eigen::Index count = costs.rows();
  std::vector<int> dominated_by(static_cast<std::size_t>(count), 0);
  std::vector<std::vector<Eigen::Index>> dominated_set(static_cast<std::size_t>(count));

#pragma omp parallel for schedule(dynamic, 16)
  for (Eigen::Index i = 0; i < count; ++i) {
    for (Eigen::Index j = 0; j < count; ++j) {
      if (i == j) continue;
      if (dominates(costs, i, j)) dominated_set[i].push_back(j);
      if (dominates(costs, j, i)) ++dominated_by[i];
    }
  }

  std::vector<int> level(static_cast<std::size_t>(count), 0);
  std::vector<Eigen::Index> front;
  for (Eigen::Index i = 0; i < count; ++i) {
    if (dominated_by[i] == 0) front.push_back(i);
  }
  for (int current = 1; !front.empty(); ++current) {
    std::vector<Eigen::Index> next;
    for (auto i : front) {
      level[i] = current;
      for (auto j : dominated_set[i]) {
        if (--dominated_by[j] == 0) next.push_back(j);
      }
    }
    front = std::move(next);
  }
  return level;
}

}  // namespace hola::kernels
