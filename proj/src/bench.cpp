#include "hola/bench.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "csv.hpp"
#include "hola/coordinator.hpp"
#include "hola/lowdisc.hpp"
#include "hola/search.hpp"

namespace hola::bench {
namespace {

constexpr double pi = std::numbers::pi;

double sq(double v) { return v * v; }

BenchmarkFn ackley(std::size_t d) {
  return {"ackley" + std::to_string(d),
          std::vector<Interval>(d, {-32.768, 32.768}),
          [](std::span<const double> x) {
            double s2 = 0.0, sc = 0.0;
            for (double v : x) {
              s2 += v * v;
              sc += std::cos(2.0 * pi * v);
            }
            const double n = static_cast<double>(x.size());
            return -20.0 * std::exp(-0.2 * std::sqrt(s2 / n)) - std::exp(sc / n) + 20.0 +
                   std::numbers::e;
          },
          0.0,
          std::vector<double>(d, 0.0)};
}

BenchmarkFn rastrigin(std::size_t d) {
  return {"rastrigin" + std::to_string(d),
          std::vector<Interval>(d, {-5.12, 5.12}),
          [](std::span<const double> x) {
            double s = 10.0 * static_cast<double>(x.size());
            for (double v : x) s += v * v - 10.0 * std::cos(2.0 * pi * v);
            return s;
          },
          0.0,
          std::vector<double>(d, 0.0)};
}

// The constant is 418.9829 in most references; the extra digits put the
// global minimum at 0 to within rounding.
constexpr double kSchwefelConstant = 418.982887272433799807913601398;

BenchmarkFn schwefel(std::size_t d) {
  return {"schwefel" + std::to_string(d),
          std::vector<Interval>(d, {-500.0, 500.0}),
          [](std::span<const double> x) {
            double s = kSchwefelConstant * static_cast<double>(x.size());
            for (double v : x) s -= v * std::sin(std::sqrt(std::abs(v)));
            return s;
          },
          0.0,
          std::vector<double>(d, 420.968746359982025)};
}

std::vector<BenchmarkFn> build_suite() {
  std::vector<BenchmarkFn> suite;
  suite.push_back(ackley(2));
  suite.push_back(ackley(5));
  suite.push_back(ackley(7));
  suite.push_back({"branin",
                   {{-5.0, 10.0}, {0.0, 15.0}},
                   [](std::span<const double> x) {
                     const double b = 5.1 / (4.0 * pi * pi), c = 5.0 / pi, t = 1.0 / (8.0 * pi);
                     return sq(x[1] - b * x[0] * x[0] + c * x[0] - 6.0) +
                            10.0 * (1.0 - t) * std::cos(x[0]) + 10.0;
                   },
                   0.39788735772973816,
                   {pi, 2.275}});
  suite.push_back({"bukin6",
                   {{-15.0, -5.0}, {-3.0, 3.0}},
                   [](std::span<const double> x) {
                     return 100.0 * std::sqrt(std::abs(x[1] - 0.01 * x[0] * x[0])) +
                            0.01 * std::abs(x[0] + 10.0);
                   },
                   0.0,
                   {-10.0, 1.0}});
  suite.push_back({"cross_in_tray",
                   {{-10.0, 10.0}, {-10.0, 10.0}},
                   [](std::span<const double> x) {
                     const double e = std::abs(100.0 - std::hypot(x[0], x[1]) / pi);
                     const double inner = std::abs(std::sin(x[0]) * std::sin(x[1]) * std::exp(e)) + 1.0;
                     return -0.0001 * std::pow(inner, 0.1);
                   },
                   -2.062611870822739,
                   {1.349406608602084, 1.349406608602084}});
  suite.push_back({"drop_wave",
                   {{-5.12, 5.12}, {-5.12, 5.12}},
                   [](std::span<const double> x) {
                     const double r2 = x[0] * x[0] + x[1] * x[1];
                     return -(1.0 + std::cos(12.0 * std::sqrt(r2))) / (0.5 * r2 + 2.0);
                   },
                   -1.0,
                   {0.0, 0.0}});
  suite.push_back({"egg_holder",
                   {{-512.0, 512.0}, {-512.0, 512.0}},
                   [](std::span<const double> x) {
                     return -(x[1] + 47.0) * std::sin(std::sqrt(std::abs(x[1] + x[0] / 2.0 + 47.0))) -
                            x[0] * std::sin(std::sqrt(std::abs(x[0] - (x[1] + 47.0))));
                   },
                   -959.6406627208507,
                   {512.0, 404.2318050882382}});
  suite.push_back({"forrester",
                   {{0.0, 1.0}},
                   [](std::span<const double> x) {
                     return sq(6.0 * x[0] - 2.0) * std::sin(12.0 * x[0] - 4.0);
                   },
                   -6.020740055767083,
                   {0.7572487144081974}});
  suite.push_back({"holder_table",
                   {{-10.0, 10.0}, {-10.0, 10.0}},
                   [](std::span<const double> x) {
                     const double e = std::abs(1.0 - std::hypot(x[0], x[1]) / pi);
                     return -std::abs(std::sin(x[0]) * std::cos(x[1]) * std::exp(e));
                   },
                   -19.20850256788675,
                   {8.05502347573655, 9.664590028909654}});
  suite.push_back({"levy13",
                   {{-10.0, 10.0}, {-10.0, 10.0}},
                   [](std::span<const double> x) {
                     return sq(std::sin(3.0 * pi * x[0])) +
                            sq(x[0] - 1.0) * (1.0 + sq(std::sin(3.0 * pi * x[1]))) +
                            sq(x[1] - 1.0) * (1.0 + sq(std::sin(2.0 * pi * x[1])));
                   },
                   0.0,
                   {1.0, 1.0}});
  suite.push_back(rastrigin(2));
  suite.push_back(rastrigin(5));
  suite.push_back(rastrigin(7));
  suite.push_back(schwefel(2));
  suite.push_back(schwefel(5));
  suite.push_back(schwefel(7));
  suite.push_back({"six_hump_camel",
                   {{-3.0, 3.0}, {-2.0, 2.0}},
                   [](std::span<const double> x) {
                     const double a = x[0] * x[0], b = x[1] * x[1];
                     return (4.0 - 2.1 * a + a * a / 3.0) * a + x[0] * x[1] + (-4.0 + 4.0 * b) * b;
                   },
                   -1.0316284534898774,
                   {0.08984201368301331, -0.7126564032704135}});
  return suite;
}

std::vector<double> map_to_box(const BenchmarkFn& fn, std::span<const double> unit) {
  std::vector<double> x(unit.size());
  for (std::size_t i = 0; i < unit.size(); ++i) {
    const auto& [lo, hi] = fn.domain[i];
    x[i] = std::clamp(lo + unit[i] * (hi - lo), lo, hi);
  }
  return x;
}

RunRecord start_record(std::string optimizer, const BenchmarkFn& fn, std::size_t budget,
                       std::uint64_t seed) {
  if (budget == 0) throw std::invalid_argument("iterations must be at least 1");
  RunRecord r;
  r.optimizer = std::move(optimizer);
  r.benchmark = fn.name;
  r.budget = budget;
  r.seed = seed;
  r.best = kInfinity;
  return r;
}

void observe(RunRecord& r, double value) {
  r.best = std::min(r.best, value);
  r.trace.push_back(r.best);
}

// The coarsest IGR lattice has two points per dimension.
bool igr_fits(const BenchmarkFn& fn, std::size_t budget) {
  return std::pow(2.0, static_cast<double>(fn.dimension())) <= static_cast<double>(budget);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

double BenchmarkFn::operator()(std::span<const double> x) const {
  if (x.size() != domain.size()) {
    throw std::invalid_argument(name + ": expected " + std::to_string(domain.size()) + " coordinates");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= domain[i].lower && x[i] <= domain[i].upper)) {
      throw std::out_of_range(name + ": coordinate " + std::to_string(i) + " outside the domain");
    }
  }
  return formula(x);
}

const std::vector<BenchmarkFn>& benchmark_suite() {
  static const std::vector<BenchmarkFn> suite = build_suite();
  return suite;
}

const BenchmarkFn& find_benchmark(std::string_view name) {
  for (const auto& fn : benchmark_suite()) {
    if (fn.name == name) return fn;
  }
  throw std::invalid_argument("unknown benchmark '" + std::string(name) + "'");
}

std::vector<std::string> low_dimensional_suite() {
  std::vector<std::string> names;
  for (const auto& fn : benchmark_suite()) {
    if (fn.dimension() <= 2) names.push_back(fn.name);
  }
  return names;
}

double eval_benchmark(const BenchmarkFn& fn, std::span<const double> x) { return fn(x); }

RunRecord random_search(const BenchmarkFn& fn, std::size_t iterations, std::uint64_t seed) {
  RunRecord r = start_record("random", fn, iterations, seed);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> u(fn.dimension());
  for (std::size_t i = 0; i < iterations; ++i) {
    for (auto& v : u) v = unit(rng);
    observe(r, fn(map_to_box(fn, u)));
  }
  return r;
}

RunRecord random_search_x2(const BenchmarkFn& fn, std::size_t iterations, std::uint64_t seed) {
  RunRecord r = random_search(fn, 2 * iterations, seed);
  r.optimizer = "random_x2";
  r.budget = iterations;
  return r;
}

RunRecord sobol_search(const BenchmarkFn& fn, std::size_t iterations) {
  RunRecord r = start_record("sobol", fn, iterations, 0);
  SobolStream stream(fn.dimension());
  for (std::size_t i = 0; i < iterations; ++i) observe(r, fn(map_to_box(fn, stream.next())));
  return r;
}

RunRecord igr(const BenchmarkFn& fn, std::size_t iterations, IgrOptions options,
              std::uint64_t seed) {
  if (options.points_per_dim < 2) throw std::invalid_argument("IGR needs at least 2 points per dimension");
  if (!(options.shrink > 0.0 && options.shrink <= 1.0)) {
    throw std::invalid_argument("IGR shrink factor must lie in (0, 1]");
  }
  const std::size_t d = fn.dimension();
  const auto p = static_cast<std::size_t>(options.points_per_dim);
  std::size_t lattice = 1;
  for (std::size_t i = 0; i < d; ++i) {
    lattice *= p;
    if (lattice > iterations) {
      throw std::invalid_argument("IGR: one lattice of " + std::to_string(p) + "^" +
                                  std::to_string(d) + " points exceeds the budget of " +
                                  std::to_string(iterations));
    }
  }
  RunRecord r = start_record("igr", fn, iterations, seed);
  std::vector<Interval> box = fn.domain;
  std::vector<double> best_x(d), x(d);
  std::vector<std::size_t> digit(d);
  while (r.trace.size() < iterations) {
    std::fill(digit.begin(), digit.end(), 0);
    for (std::size_t k = 0; k < lattice && r.trace.size() < iterations; ++k) {
      for (std::size_t i = 0; i < d; ++i) {
        const double t = static_cast<double>(digit[i]) / static_cast<double>(p - 1);
        x[i] = std::clamp(box[i].lower + t * (box[i].upper - box[i].lower), fn.domain[i].lower,
                          fn.domain[i].upper);
      }
      const double v = fn(x);
      if (v < r.best) best_x = x;
      observe(r, v);
      for (std::size_t i = 0; i < d && ++digit[i] == p; ++i) digit[i] = 0;
    }
    // Recentre on the incumbent and shrink; a box poking out of the domain
    // is slid back inside, keeping its width.
    for (std::size_t i = 0; i < d; ++i) {
      const auto [dlo, dhi] = fn.domain[i];
      const double width = std::min(options.shrink * (box[i].upper - box[i].lower), dhi - dlo);
      double lo = best_x[i] - 0.5 * width;
      lo = std::clamp(lo, dlo, dhi - width);
      box[i] = {lo, std::min(dhi, lo + width)};
    }
  }
  return r;
}

RunRecord hola_search(const BenchmarkFn& fn, std::size_t iterations, std::uint64_t seed) {
  RunRecord r = start_record("hola", fn, iterations, seed);
  std::vector<ParamSpec> params;
  for (std::size_t i = 0; i < fn.dimension(); ++i) {
    ParamSpec s;
    s.name = "x" + std::to_string(i);
    s.lower = fn.domain[i].lower;
    s.upper = fn.domain[i].upper;
    params.push_back(std::move(s));
  }
  // Limit from the observed range over Sobol probes, doubled for headroom.
  SobolStream probes(fn.dimension());
  double lo = kInfinity, hi = -kInfinity;
  for (int i = 0; i < 1000; ++i) {
    const double v = fn(map_to_box(fn, probes.next()));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double target = std::min(fn.minimum_value, lo);
  const double limit = std::max(hi + (hi - lo), target + 1.0);
  ObjectiveSet objectives({ObjectiveSpec{"f", target, limit, 1.0}});

  SearchOptions options;
  options.intended_runs = iterations;
  options.seed = seed;
  options.parallel = false;
  SearchState state(ParamSpace(std::move(params)), std::move(objectives), options);
  for (std::size_t i = 0; i < iterations; ++i) {
    auto x = state.suggest().x;
    const double v = fn(x);
    state.add_trial(std::move(x), {v});
    observe(r, v);
  }
  return r;
}

RunRecord run_optimizer(std::string_view optimizer, const BenchmarkFn& fn, std::size_t budget,
                        std::uint64_t seed) {
  if (optimizer == "random") return random_search(fn, budget, seed);
  if (optimizer == "random_x2") return random_search_x2(fn, budget, seed);
  if (optimizer == "sobol") return sobol_search(fn, budget);
  if (optimizer == "hola") return hola_search(fn, budget, seed);
  if (optimizer == "igr") {
    // Coarsen the lattice until one sweep fits the budget.
    IgrOptions options;
    while (options.points_per_dim > 2 &&
           std::pow(options.points_per_dim, static_cast<double>(fn.dimension())) >
               static_cast<double>(budget)) {
      --options.points_per_dim;
    }
    return igr(fn, budget, options, seed);
  }
  throw std::invalid_argument("unknown optimizer '" + std::string(optimizer) + "'");
}

std::uint64_t run_seed(std::uint64_t seed, std::size_t optimizer, std::size_t benchmark,
                       std::size_t budget, std::size_t repeat) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ optimizer);
  h = splitmix64(h ^ benchmark);
  h = splitmix64(h ^ budget);
  return splitmix64(h ^ repeat);
}

std::vector<RunRecord> run_experiment(const ExperimentSpec& spec) {
  if (spec.repeats < 1) throw std::invalid_argument("repeats must be at least 1");
  struct Task {
    std::size_t optimizer, benchmark, budget, repeat;
  };
  std::vector<const BenchmarkFn*> fns;
  for (const auto& name : spec.benchmarks) fns.push_back(&find_benchmark(name));
  for (const auto& name : spec.optimizers) {
    if (std::find(std::begin(kOptimizers), std::end(kOptimizers), name) == std::end(kOptimizers)) {
      throw std::invalid_argument("unknown optimizer '" + name + "'");
    }
  }
  std::vector<Task> tasks;
  for (std::size_t o = 0; o < spec.optimizers.size(); ++o)
    for (std::size_t b = 0; b < fns.size(); ++b)
      for (std::size_t g = 0; g < spec.budgets.size(); ++g)
        if (spec.optimizers[o] == "igr" && !igr_fits(*fns[b], spec.budgets[g])) {
          spdlog::warn("igr skipped on {} at budget {}: one lattice exceeds the budget",
                       fns[b]->name, spec.budgets[g]);
        } else {
          for (std::size_t r = 0; r < spec.repeats; ++r) tasks.push_back({o, b, g, r});
        }

  std::vector<RunRecord> records(tasks.size());
  auto run_task = [&](std::size_t i) {
    const Task& t = tasks[i];
    const std::size_t budget = spec.budgets[t.budget];
    const auto seed = run_seed(spec.seed, t.optimizer, t.benchmark, budget, t.repeat);
    records[i] = run_optimizer(spec.optimizers[t.optimizer], *fns[t.benchmark], budget, seed);
    records[i].repeat = t.repeat;
  };
  const auto count = static_cast<std::ptrdiff_t>(tasks.size());
  if (spec.parallel) {
    // Exceptions must not escape the parallel region; rethrow the first one.
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      try {
        run_task(static_cast<std::size_t>(i));
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (std::ptrdiff_t i = 0; i < count; ++i) run_task(static_cast<std::size_t>(i));
  }
  return records;
}

std::vector<Summary> aggregate_normalized(const std::vector<RunRecord>& records) {
  using GroupKey = std::pair<std::string, std::size_t>;  // benchmark, budget
  std::map<GroupKey, std::pair<double, double>> range;
  for (const auto& r : records) {
    auto [it, fresh] = range.try_emplace({r.benchmark, r.budget}, r.best, r.best);
    if (!fresh) {
      it->second.first = std::min(it->second.first, r.best);
      it->second.second = std::max(it->second.second, r.best);
    }
  }
  // (optimizer, budget, benchmark) -> (sum, count)
  std::map<std::tuple<std::string, std::size_t, std::string>, std::pair<double, std::size_t>> per_bench;
  for (const auto& r : records) {
    const auto [lo, hi] = range.at({r.benchmark, r.budget});
    const double norm = hi > lo ? (r.best - lo) / (hi - lo) : 0.0;
    auto& acc = per_bench[{r.optimizer, r.budget, r.benchmark}];
    acc.first += norm;
    ++acc.second;
  }
  std::map<std::pair<std::string, std::size_t>, std::pair<double, std::size_t>> per_optimizer;
  for (const auto& [key, acc] : per_bench) {
    auto& out = per_optimizer[{std::get<0>(key), std::get<1>(key)}];
    out.first += acc.first / static_cast<double>(acc.second);
    ++out.second;
  }
  std::vector<Summary> summary;
  for (const auto& [key, acc] : per_optimizer) {
    summary.push_back({key.first, key.second, acc.first / static_cast<double>(acc.second)});
  }
  return summary;
}

void write_records_csv(const std::vector<RunRecord>& records, std::ostream& out) {
  out << "optimizer,benchmark,budget,repeat,seed,best\n";
  for (const auto& r : records) {
    out << r.optimizer << ',' << r.benchmark << ',' << r.budget << ',' << r.repeat << ','
        << r.seed << ',' << format_number(r.best) << '\n';
  }
}

std::vector<RunRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("results file is empty");
  const auto header = detail::csv_split(line);
  auto column = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::runtime_error("results file lacks column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto c_opt = column("optimizer"), c_bench = column("benchmark"), c_budget = column("budget"),
             c_best = column("best");
  const auto rep_it = std::find(header.begin(), header.end(), "repeat");
  const auto seed_it = std::find(header.begin(), header.end(), "seed");
  std::vector<RunRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto f = detail::csv_split(line);
    if (f.size() != header.size()) {
      throw std::runtime_error("results line " + std::to_string(line_no) + ": wrong field count");
    }
    RunRecord r;
    r.optimizer = f[c_opt];
    r.benchmark = f[c_bench];
    const auto budget = detail::parse_double(f[c_budget]);
    const auto best = detail::parse_double(f[c_best]);
    if (!budget || !best) {
      throw std::runtime_error("results line " + std::to_string(line_no) + ": malformed number");
    }
    r.budget = static_cast<std::size_t>(*budget);
    r.best = *best;
    if (rep_it != header.end()) r.repeat = std::stoul(f[static_cast<std::size_t>(rep_it - header.begin())]);
    if (seed_it != header.end()) r.seed = std::stoull(f[static_cast<std::size_t>(seed_it - header.begin())]);
    records.push_back(std::move(r));
  }
  return records;
}

void write_summary_csv(const std::vector<Summary>& summary, std::ostream& out) {
  out << "optimizer,budget,mean_of_means\n";
  for (const auto& s : summary) {
    out << s.optimizer << ',' << s.budget << ',' << format_number(s.mean_of_means) << '\n';
  }
}

}  // namespace hola::bench
