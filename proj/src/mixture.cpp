#include "hola/mixture.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace hola {
namespace {

Eigen::MatrixXd clip_eigenvalues(const Eigen::MatrixXd& cov, double floor) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::VectorXd values = eig.eigenvalues().cwiseMax(floor);
  Eigen::MatrixXd out = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

void run_estep(bool parallel, const Eigen::MatrixXd& points, const MixtureModel& model,
               Eigen::MatrixXd& resp, std::vector<double>& log_density) {
  log_density.resize(static_cast<std::size_t>(points.cols()));
  if (parallel) {
    kernels::estep_parallel(points, model.terms(), resp, log_density);
  } else {
    kernels::estep_serial(points, model.terms(), resp, log_density);
  }
}

// k-means++ seeding: the first centre uniformly, then proportional to the
// squared distance to the nearest chosen centre.
std::vector<Eigen::Index> seed_centres(const Eigen::MatrixXd& points, int count,
                                       std::mt19937_64& rng) {
  const Eigen::Index n = points.cols();
  std::vector<Eigen::Index> centres;
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  centres.push_back(pick(rng));
  std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  while (static_cast<int>(centres.size()) < count) {
    const auto& last = points.col(centres.back());
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (points.col(i) - last).squaredNorm());
      total += d2[i];
    }
    if (!(total > 0.0)) {
      centres.push_back(pick(rng));
      continue;
    }
    const double target = std::uniform_real_distribution<double>(0.0, total)(rng);
    double acc = 0.0;
    Eigen::Index chosen = n - 1;
    for (Eigen::Index i = 0; i < n; ++i) {
      acc += d2[i];
      if (target < acc) {
        chosen = i;
        break;
      }
    }
    centres.push_back(chosen);
  }
  return centres;
}

struct FitResult {
  MixtureModel model;
  double log_likelihood;
};

FitResult fit_components(const Eigen::MatrixXd& points, int count, const FitOptions& options) {
  const Eigen::Index n = points.cols();
  const MixtureComponent global = fit_single_gaussian(points, options.covariance_floor);

  if (count == 1) {
    MixtureModel model({global});
    const double ll = model.log_likelihood(points);
    if (options.on_iteration) options.on_iteration(1, 0, ll);
    return {std::move(model), ll};
  }

  std::mt19937_64 rng(options.seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(count));
  std::vector<MixtureComponent> init;
  for (auto idx : seed_centres(points, count, rng)) {
    init.push_back({1.0 / count, points.col(idx), global.covariance});
  }
  MixtureModel model(std::move(init));

  Eigen::MatrixXd resp;
  std::vector<double> log_density;
  double previous = -std::numeric_limits<double>::infinity();
  double ll = previous;
  for (int iter = 0;; ++iter) {
    run_estep(options.parallel, points, model, resp, log_density);
    ll = std::accumulate(log_density.begin(), log_density.end(), 0.0);
    if (options.on_iteration) options.on_iteration(static_cast<int>(model.size()), iter, ll);
    if (iter > 0 && ll - previous <= options.tolerance * std::abs(previous)) break;
    if (iter >= options.max_iterations) break;
    previous = ll;

    std::vector<MixtureComponent> next;
    for (Eigen::Index k = 0; k < resp.rows(); ++k) {
      const double nk = resp.row(k).sum();
      if (!(nk > 1e-12 * static_cast<double>(n))) continue;
      const Eigen::VectorXd mean = points * resp.row(k).transpose() / nk;
      const Eigen::MatrixXd centred = points.colwise() - mean;
      const Eigen::MatrixXd cov =
          (centred * resp.row(k).transpose().asDiagonal()) * centred.transpose() / nk;
      next.push_back({nk / static_cast<double>(n), mean,
                      clip_eigenvalues(cov, options.covariance_floor)});
    }
    model = MixtureModel(std::move(next));
  }
  return {std::move(model), ll};
}

}  // namespace

// ---------------------------------------------------------------------------
// MixtureModel

MixtureModel::MixtureModel(std::vector<MixtureComponent> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("mixture needs at least one component");
  const auto dim = components_.front().mean.size();
  double total = 0.0;
  for (const auto& c : components_) {
    if (c.mean.size() != dim || c.covariance.rows() != dim || c.covariance.cols() != dim) {
      throw std::invalid_argument("mixture components have inconsistent dimensions");
    }
    if (!(c.weight >= 0.0) || !std::isfinite(c.weight)) {
      throw std::invalid_argument("mixture weights must be non-negative");
    }
    total += c.weight;
  }
  if (!(total > 0.0)) throw std::invalid_argument("mixture weights sum to zero");

  double acc = 0.0;
  for (auto& c : components_) {
    c.weight /= total;
    acc += c.weight;
    cumulative_.push_back(acc);
    transforms_.emplace_back(c.mean, c.covariance);
    kernels::GaussianTerm term;
    term.log_weight = std::log(c.weight);
    term.mean = c.mean;
    term.chol = transforms_.back().factor();
    term.log_det = 2.0 * term.chol.diagonal().array().log().sum();
    terms_.push_back(std::move(term));
  }
  cumulative_.back() = 1.0;
}

double MixtureModel::log_density(const Eigen::VectorXd& x) const {
  double peak = -std::numeric_limits<double>::infinity();
  std::vector<double> parts;
  for (const auto& t : terms_) {
    parts.push_back(t.log_weight + kernels::log_gaussian(x, t));
    peak = std::max(peak, parts.back());
  }
  double sum = 0.0;
  for (double p : parts) sum += std::exp(p - peak);
  return peak + std::log(sum);
}

double MixtureModel::log_likelihood(const Eigen::MatrixXd& points) const {
  double total = 0.0;
  for (Eigen::Index i = 0; i < points.cols(); ++i) total += log_density(points.col(i));
  return total;
}

std::size_t MixtureModel::select_component(double u) const {
  std::size_t last_positive = 0;
  for (std::size_t j = 0; j < components_.size(); ++j) {
    if (components_[j].weight <= 0.0) continue;
    last_positive = j;
    if (u < cumulative_[j]) return j;
  }
  return last_positive;
}

Eigen::VectorXd MixtureModel::sample(std::mt19937_64& rng) const {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const auto j = select_component(u);
  std::normal_distribution<double> normal;
  Eigen::VectorXd g(components_[j].mean.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = normal(rng);
  return transforms_[j].apply(g);
}

Eigen::VectorXd MixtureModel::sample(std::mt19937_64& rng, SobolStream& stream) const {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return gauss_sobol_next(stream, transforms_[select_component(u)]);
}

// ---------------------------------------------------------------------------
// Fitting

MixtureComponent fit_single_gaussian(const Eigen::MatrixXd& points, double floor) {
  if (points.cols() < 1) throw std::invalid_argument("fit_single_gaussian: no points");
  const Eigen::VectorXd mean = points.rowwise().mean();
  const Eigen::MatrixXd centred = points.colwise() - mean;
  const Eigen::MatrixXd cov = centred * centred.transpose() / static_cast<double>(points.cols());
  return {1.0, mean, clip_eigenvalues(cov, floor)};
}

double bic(const MixtureModel& model, const Eigen::MatrixXd& points) {
  const double c = static_cast<double>(model.size());
  const double n = static_cast<double>(model.dimension());
  const double params = (c - 1.0) + c * n + c * n * (n + 1.0) / 2.0;
  return -2.0 * model.log_likelihood(points) + params * std::log(static_cast<double>(points.cols()));
}

MixtureModel fit_mixture(const Eigen::MatrixXd& points, const FitOptions& options) {
  if (points.cols() < 2) throw std::invalid_argument("fit_mixture needs at least two points");
  if (points.rows() < 1) throw std::invalid_argument("fit_mixture: points have no coordinates");
  if (options.max_components < 1) throw std::invalid_argument("max_components must be >= 1");

  const auto n_points = static_cast<double>(points.cols());
  const auto dim = static_cast<double>(points.rows());
  std::optional<MixtureModel> best;
  double best_bic = std::numeric_limits<double>::infinity();
  for (int c = 1; c <= options.max_components; ++c) {
    if (c > 1 && n_points < options.points_per_parameter * dim * c) break;
    auto fit = fit_components(points, c, options);
    const double score = bic(fit.model, points);
    if (!best || score < best_bic) {
      best_bic = score;
      best = std::move(fit.model);
    }
  }
  return std::move(*best);
}

MixtureModel fit_mixture(std::span<const std::vector<double>> points, const FitOptions& options) {
  if (points.empty()) throw std::invalid_argument("fit_mixture needs at least two points");
  const auto dim = static_cast<Eigen::Index>(points.front().size());
  Eigen::MatrixXd m(dim, static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (static_cast<Eigen::Index>(points[i].size()) != dim) {
      throw std::invalid_argument("fit_mixture: points have different lengths");
    }
    m.col(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::VectorXd>(points[i].data(), dim);
  }
  return fit_mixture(m, options);
}

}  // namespace hola
