// Serial reference vs OpenMP variant for each parallel kernel.

#include <benchmark/benchmark.h>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <random>
#include <vector>

#include "hola/bench.hpp"
#include "hola/kernels.hpp"

namespace {

using hola::kernels::GaussianTerm;

std::vector<GaussianTerm> make_terms(int dim, int components, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<GaussianTerm> terms;
  for (int k = 0; k < components; ++k) {
    GaussianTerm t;
    t.log_weight = std::log(1.0 / components);
    t.mean = Eigen::VectorXd::NullaryExpr(dim, [&] { return normal(rng); });
    Eigen::MatrixXd a = Eigen::MatrixXd::NullaryExpr(dim, dim, [&] { return normal(rng); });
    Eigen::MatrixXd cov = a * a.transpose() / dim + Eigen::MatrixXd::Identity(dim, dim);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    t.chol = llt.matrixL();
    t.log_det = 2.0 * t.chol.diagonal().array().log().sum();
    terms.push_back(std::move(t));
  }
  return terms;
}

template <bool Parallel>
void BM_Estep(benchmark::State& state) {
  const int count = static_cast<int>(state.range(0));
  const int dim = 8, components = 3;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  const auto terms = make_terms(dim, components, rng);
  const Eigen::MatrixXd points = Eigen::MatrixXd::NullaryExpr(dim, count, [&] { return normal(rng); });
  Eigen::MatrixXd resp(components, count);
  std::vector<double> density(count);
  for (auto _ : state) {
    if constexpr (Parallel)
      hola::kernels::estep_parallel(points, terms, resp, density);
    else
      hola::kernels::estep_serial(points, terms, resp, density);
    benchmark::DoNotOptimize(resp.data());
  }
  state.SetItemsProcessed(state.iterations() * count);
}

template <bool Parallel>
void BM_ParetoLevels(benchmark::State& state) {
  const auto rows = state.range(0);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif;
  const Eigen::MatrixXd costs = Eigen::MatrixXd::NullaryExpr(rows, 3, [&] { return unif(rng); });
  for (auto _ : state) {
    auto levels = Parallel ? hola::kernels::pareto_levels_parallel(costs)
                           : hola::kernels::pareto_levels_serial(costs);
    benchmark::DoNotOptimize(levels.data());
  }
  state.SetItemsProcessed(state.iterations() * rows);
}

template <bool Parallel>
void BM_Experiment(benchmark::State& state) {
  hola::bench::ExperimentSpec spec;
  spec.optimizers = {"random", "sobol", "igr"};
  spec.benchmarks = {"ackley2", "branin", "rastrigin5"};
  spec.budgets = {50, 100};
  spec.repeats = 8;
  spec.seed = 3;
  spec.parallel = Parallel;
  for (auto _ : state) {
    auto records = hola::bench::run_experiment(spec);
    benchmark::DoNotOptimize(records.data());
  }
}

}  // namespace

BENCHMARK(BM_Estep<false>)->Name("estep/serial")->Arg(1000)->Arg(10000)->Arg(100000);
BENCHMARK(BM_Estep<true>)->Name("estep/openmp")->Arg(1000)->Arg(10000)->Arg(100000)->UseRealTime();
BENCHMARK(BM_ParetoLevels<false>)->Name("pareto_levels/serial")->Arg(200)->Arg(1000)->Arg(4000);
BENCHMARK(BM_ParetoLevels<true>)->Name("pareto_levels/openmp")->Arg(200)->Arg(1000)->Arg(4000)->UseRealTime();
BENCHMARK(BM_Experiment<false>)->Name("run_experiment/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Experiment<true>)->Name("run_experiment/openmp")->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
