#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hola::bench {

struct Interval {
  double lower;
  double upper;
};

/// Closed-form test function on a box domain.
struct BenchmarkFn {
  std::string name;
  std::vector<Interval> domain;
  std::function<double(std::span<const double>)> formula;
  double minimum_value = 0.0;
  std::vector<double> minimizer;

  std::size_t dimension() const { return domain.size(); }
  /// Evaluates the formula; throws std::out_of_range outside the domain.
  double operator()(std::span<const double> x) const;
};

/// Ackley (2/5/7D), Branin, Bukin 6, Cross-in-Tray, Drop-Wave, Egg Holder,
/// Forrester, Holder Table, Levy 13, Rastrigin (2/5/7D), Schwefel (2/5/7D),
/// Six-Hump Camel.
const std::vector<BenchmarkFn>& benchmark_suite();
const BenchmarkFn& find_benchmark(std::string_view name);
/// Names of the suite members with at most two dimensions.
std::vector<std::string> low_dimensional_suite();

double eval_benchmark(const BenchmarkFn& fn, std::span<const double> x);

struct RunRecord {
  std::string optimizer;
  std::string benchmark;
  std::size_t budget = 0;
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  double best = 0.0;
  /// Incumbent best after each evaluation.
  std::vector<double> trace;
};

RunRecord random_search(const BenchmarkFn& fn, std::size_t iterations, std::uint64_t seed);
/// Random search with twice the evaluations, recorded at the nominal budget.
RunRecord random_search_x2(const BenchmarkFn& fn, std::size_t iterations, std::uint64_t seed);
RunRecord sobol_search(const BenchmarkFn& fn, std::size_t iterations);

struct IgrOptions {
  int points_per_dim = 5;
  double shrink = 0.5;
};
/// Iterative grid refinement: evaluate a lattice over the box, recentre the
/// box on the incumbent, shrink its edges, slide it back inside the domain,
/// repeat.
/// Throws std::invalid_argument when one lattice exceeds the budget.
RunRecord igr(const BenchmarkFn& fn, std::size_t iterations, IgrOptions options = {},
              std::uint64_t seed = 0);

/// The HOLA sampler on a single minimization objective.
RunRecord hola_search(const BenchmarkFn& fn, std::size_t iterations, std::uint64_t seed);

inline constexpr std::string_view kOptimizers[] = {"random", "random_x2", "sobol", "igr", "hola"};

RunRecord run_optimizer(std::string_view optimizer, const BenchmarkFn& fn, std::size_t budget,
                        std::uint64_t seed);

struct ExperimentSpec {
  std::vector<std::string> optimizers;
  std::vector<std::string> benchmarks;
  std::vector<std::size_t> budgets;
  std::size_t repeats = 20;
  std::uint64_t seed = 0;
  bool parallel = true;
};

/// Full factorial optimizer x benchmark x budget x repeat, in that nesting
/// order. Run seeds derive from `seed` and the run coordinates. IGR cells
/// where even a 2-point lattice exceeds the budget are skipped with a warning.
std::vector<RunRecord> run_experiment(const ExperimentSpec& spec);

std::uint64_t run_seed(std::uint64_t seed, std::size_t optimizer, std::size_t benchmark,
                       std::size_t budget, std::size_t repeat);

struct Summary {
  std::string optimizer;
  std::size_t budget = 0;
  double mean_of_means = 0.0;
};

/// Min-max normalizes best values within each (benchmark, budget) group,
/// averages per (optimizer, benchmark, budget), then across benchmarks.
/// A group whose bests are all equal normalizes to 0.
std::vector<Summary> aggregate_normalized(const std::vector<RunRecord>& records);

void write_records_csv(const std::vector<RunRecord>& records, std::ostream& out);
std::vector<RunRecord> read_records_csv(std::istream& in);
void write_summary_csv(const std::vector<Summary>& summary, std::ostream& out);

}  // namespace hola::bench
