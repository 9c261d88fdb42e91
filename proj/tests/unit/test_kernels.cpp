#include <doctest.h>

#include <Eigen/Dense>
#include <omp.h>

#include <random>

#include "hola/kernels.hpp"
#include "oracles.hpp"

using namespace hola;

namespace {

kernels::GaussianTerm make_term(double w, Eigen::VectorXd mean, const Eigen::MatrixXd& cov) {
  kernels::GaussianTerm t;
  t.log_weight = std::log(w);
  t.mean = std::move(mean);
  t.chol = cov.llt().matrixL();
  t.log_det = 2.0 * t.chol.diagonal().array().log().sum();
  return t;
}

}  // namespace

TEST_CASE("standard normal log density at zero") {
  const auto t = make_term(1.0, Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1));
  CHECK(kernels::log_gaussian(Eigen::VectorXd::Zero(1), t) ==
        doctest::Approx(-0.9189385332046727).epsilon(1e-14));
}

TEST_CASE("serial and parallel E-steps are bit-identical") {
  omp_set_num_threads(4);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  const int n = 3, count = 500;
  Eigen::MatrixXd pts(n, count);
  for (int j = 0; j < count; ++j)
    for (int i = 0; i < n; ++i) pts(i, j) = g(rng);
  std::vector<kernels::GaussianTerm> terms{
      make_term(0.3, Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Identity(n, n)),
      make_term(0.7, Eigen::VectorXd::Constant(n, 1.0), 2.0 * Eigen::MatrixXd::Identity(n, n))};
  Eigen::MatrixXd r1(2, count), r2(2, count);
  std::vector<double> l1(count), l2(count);
  kernels::estep_serial(pts, terms, r1, l1);
  kernels::estep_parallel(pts, terms, r2, l2);
  CHECK(r1 == r2);
  CHECK(l1 == l2);
  for (int j = 0; j < count; ++j) CHECK(r1.col(j).sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("Pareto levels of the five-point example") {
  Eigen::MatrixXd c(5, 2);
  c << 1, 3, 2, 2, 3, 1, 2, 3, 3, 3;
  const std::vector<int> expected{1, 1, 1, 2, 3};
  CHECK(kernels::pareto_levels_serial(c) == expected);
  CHECK(kernels::pareto_levels_parallel(c) == expected);
  CHECK(kernels::dominates(c, 1, 3));
  CHECK_FALSE(kernels::dominates(c, 0, 2));
}

TEST_CASE("duplicates and singletons are level 1") {
  Eigen::MatrixXd dup(3, 2);
  dup << 1, 1, 1, 1, 1, 1;
  CHECK(kernels::pareto_levels_parallel(dup) == std::vector<int>{1, 1, 1});
  Eigen::MatrixXd one(1, 3);
  one << 4, 5, 6;
  CHECK(kernels::pareto_levels_serial(one) == std::vector<int>{1});
  CHECK(kernels::pareto_levels_parallel(Eigen::MatrixXd(0, 2)).empty());
}

TEST_CASE("property: both sorts match the brute-force oracle") {
  omp_set_num_threads(3);
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 60; ++rep) {
    const int k = 1 + static_cast<int>(rng() % 200);
    const int m = 2 + static_cast<int>(rng() % 2);
    std::uniform_int_distribution<int> coarse(0, 9);  // forces ties
    Eigen::MatrixXd c(k, m);
    std::vector<std::vector<double>> rows(k, std::vector<double>(m));
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < m; ++j) rows[i][j] = c(i, j) = coarse(rng);
    const auto expected = oracle::pareto_levels(rows);
    CHECK(kernels::pareto_levels_serial(c) == expected);
    CHECK(kernels::pareto_levels_parallel(c) == expected);
  }
}
