#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "hola/bench.hpp"

using namespace hola::bench;

namespace {

// Second, independent transcription of each formula, written directly from
// the literature definitions with explicit sums and no shared helpers.
double ref(const std::string& name, const std::vector<double>& x) {
  const double PI = 3.14159265358979323846;
  const std::size_t d = x.size();
  if (name.rfind("ackley", 0) == 0) {
    double a = 0, b = 0;
    for (std::size_t i = 0; i < d; ++i) {
      a += x[i] * x[i] / d;
      b += std::cos(2 * PI * x[i]) / d;
    }
    return 20 + std::exp(1.0) - 20 * std::exp(-0.2 * std::sqrt(a)) - std::exp(b);
  }
  if (name.rfind("rastrigin", 0) == 0) {
    double s = 0;
    for (double v : x) s += 10 + v * v - 10 * std::cos(2 * PI * v);
    return s;
  }
  if (name.rfind("schwefel", 0) == 0) {
    double s = 0;
    for (double v : x) s += 418.9828872724338 - v * std::sin(std::sqrt(std::fabs(v)));
    return s;
  }
  const double x1 = x[0], x2 = d > 1 ? x[1] : 0.0;
  if (name == "branin") {
    const double t = x2 - 5.1 * x1 * x1 / (4 * PI * PI) + 5 * x1 / PI - 6;
    return t * t + 10 * (1 - 1 / (8 * PI)) * std::cos(x1) + 10;
  }
  if (name == "bukin6") return 100 * std::sqrt(std::fabs(x2 - 0.01 * x1 * x1)) + 0.01 * std::fabs(x1 + 10);
  if (name == "cross_in_tray") {
    const double r = std::sqrt(x1 * x1 + x2 * x2);
    return -0.0001 * std::pow(std::fabs(std::sin(x1) * std::sin(x2) * std::exp(std::fabs(100 - r / PI))) + 1, 0.1);
  }
  if (name == "drop_wave") {
    const double r2 = x1 * x1 + x2 * x2;
    return -(1 + std::cos(12 * std::sqrt(r2))) / (0.5 * r2 + 2);
  }
  if (name == "egg_holder") {
    return -(x2 + 47) * std::sin(std::sqrt(std::fabs(x2 + x1 / 2 + 47))) -
           x1 * std::sin(std::sqrt(std::fabs(x1 - (x2 + 47))));
  }
  if (name == "forrester") return std::pow(6 * x1 - 2, 2) * std::sin(12 * x1 - 4);
  if (name == "holder_table") {
    const double r = std::sqrt(x1 * x1 + x2 * x2);
    return -std::fabs(std::sin(x1) * std::cos(x2) * std::exp(std::fabs(1 - r / PI)));
  }
  if (name == "levy13") {
    return std::pow(std::sin(3 * PI * x1), 2) + std::pow(x1 - 1, 2) * (1 + std::pow(std::sin(3 * PI * x2), 2)) +
           std::pow(x2 - 1, 2) * (1 + std::pow(std::sin(2 * PI * x2), 2));
  }
  if (name == "six_hump_camel") {
    return (4 - 2.1 * x1 * x1 + std::pow(x1, 4) / 3) * x1 * x1 + x1 * x2 + (-4 + 4 * x2 * x2) * x2 * x2;
  }
  throw std::logic_error("no reference for " + name);
}

BenchmarkFn identity_1d() {
  return {"identity", {{0.0, 1.0}}, [](std::span<const double> x) { return x[0]; }, 0.0, {0.0}};
}

BenchmarkFn parabola_1d() {
  return {"parabola", {{0.0, 1.0}}, [](std::span<const double> x) { return (x[0] - 0.3) * (x[0] - 0.3); }, 0.0, {0.3}};
}

bool non_increasing(const std::vector<double>& t) {
  for (std::size_t i = 1; i < t.size(); ++i)
    if (t[i] > t[i - 1]) return false;
  return true;
}

}  // namespace

TEST_CASE("suite membership") {
  const auto& suite = benchmark_suite();
  CHECK(suite.size() == 18);
  CHECK(find_benchmark("ackley7").dimension() == 7);
  CHECK_THROWS(find_benchmark("sphere"));
  const auto low = low_dimensional_suite();
  CHECK(low.size() == 12);
  for (const auto& n : low) CHECK(find_benchmark(n).dimension() <= 2);
}

TEST_CASE("known minima") {
  const std::vector<double> o2{0, 0};
  CHECK(eval_benchmark(find_benchmark("rastrigin2"), o2) == 0.0);
  CHECK(std::abs(eval_benchmark(find_benchmark("ackley2"), o2)) <= 1e-12);
  const std::vector<double> b{M_PI, 2.275};
  CHECK(eval_benchmark(find_benchmark("branin"), b) == doctest::Approx(0.397887).epsilon(1e-6));
  for (const auto& fn : benchmark_suite()) {
    INFO(fn.name);
    CHECK(fn(fn.minimizer) == doctest::Approx(fn.minimum_value).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("domain is enforced") {
  const std::vector<double> outside{40, 0};
  CHECK_THROWS_AS(eval_benchmark(find_benchmark("ackley2"), outside), std::out_of_range);
  const std::vector<double> wrong_dim{0};
  CHECK_THROWS(eval_benchmark(find_benchmark("ackley2"), wrong_dim));
}

TEST_CASE("property: formulas match the reference transcriptions") {
  std::mt19937_64 rng(13);
  for (const auto& fn : benchmark_suite()) {
    INFO(fn.name);
    for (int i = 0; i < 100; ++i) {
      std::vector<double> x(fn.dimension());
      for (std::size_t k = 0; k < x.size(); ++k) {
        x[k] = std::uniform_real_distribution<double>(fn.domain[k].lower, fn.domain[k].upper)(rng);
      }
      const double expected = ref(fn.name, x);
      CHECK(std::abs(fn(x) - expected) <= 1e-9 * std::max(1.0, std::abs(expected)));
    }
  }
}

TEST_CASE("random and Sobol baselines") {
  const auto fn = identity_1d();
  const auto one = random_search(fn, 1, 5);
  REQUIRE(one.trace.size() == 1);
  CHECK(one.best == one.trace[0]);
  CHECK(random_search(fn, 50, 5).best == random_search(fn, 50, 5).best);
  const auto sob = sobol_search(fn, 3);
  CHECK(sob.best == 0.25);
  CHECK(sob.trace == std::vector<double>{0.5, 0.5, 0.25});
  CHECK(random_search(fn, 100, 3).best <= random_search(fn, 50, 3).best);
  CHECK_THROWS(random_search(fn, 0, 1));
}

TEST_CASE("random search with twice the budget") {
  const auto& fn = find_benchmark("branin");
  const auto x2 = random_search_x2(fn, 40, 9);
  CHECK(x2.budget == 40);
  CHECK(x2.trace.size() == 80);
  CHECK(x2.best == random_search(fn, 80, 9).best);
}

TEST_CASE("IGR lattice refinement") {
  const auto fn = parabola_1d();
  const auto r = igr(fn, 15, {5, 0.5}, 0);
  REQUIRE(r.trace.size() == 15);
  CHECK(r.trace[4] == doctest::Approx(0.0025));    // 0.25
  CHECK(r.trace[9] == doctest::Approx(0.0025));    // still 0.25 in [0, 0.5]
  CHECK(r.trace[14] == doctest::Approx(0.00015625));  // 0.3125 in [0.125, 0.375]
  CHECK_THROWS(igr(fn, 4, {5, 0.5}, 0));
  CHECK_THROWS(igr(fn, 10, {1, 0.5}, 0));
  CHECK_THROWS(igr(fn, 10, {5, 0.0}, 0));
}

TEST_CASE("IGR on a symmetric function stays at the centre") {
  const auto& fn = find_benchmark("rastrigin2");
  const auto r = igr(fn, 100, {5, 0.5}, 0);
  CHECK(r.best == 0.0);
}

TEST_CASE("IGR with no shrink repeats the same lattice") {
  const auto fn = parabola_1d();
  const auto r = igr(fn, 15, {5, 1.0}, 0);
  CHECK(r.trace[4] == r.trace[14]);
}

TEST_CASE("experiment bookkeeping") {
  ExperimentSpec spec;
  spec.optimizers = {"random", "sobol", "igr", "hola", "random_x2"};
  spec.benchmarks = {"branin", "forrester", "six_hump_camel"};
  spec.budgets = {25, 50};
  spec.repeats = 3;
  spec.seed = 11;
  const auto a = run_experiment(spec);
  CHECK(a.size() == 5u * 3u * 2u * 3u);
  spec.parallel = false;
  const auto b = run_experiment(spec);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].best == b[i].best);
    CHECK(a[i].seed == b[i].seed);
    const auto& fn = find_benchmark(a[i].benchmark);
    CHECK(a[i].best >= fn.minimum_value - 1e-9 * std::max(1.0, std::abs(fn.minimum_value)));
    CHECK(non_increasing(a[i].trace));
  }
  spec.repeats = 0;
  CHECK_THROWS(run_experiment(spec));
}

TEST_CASE("normalized aggregation") {
  std::vector<RunRecord> recs{{"a", "f", 10, 0, 0, 2, {}}, {"b", "f", 10, 0, 0, 4, {}}, {"c", "f", 10, 0, 0, 6, {}}};
  auto s = aggregate_normalized(recs);
  std::map<std::string, double> m;
  for (const auto& x : s) m[x.optimizer] = x.mean_of_means;
  CHECK(m == std::map<std::string, double>{{"a", 0.0}, {"b", 0.5}, {"c", 1.0}});

  for (auto& r : recs) r.best += 17.25;
  auto shifted = aggregate_normalized(recs);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(shifted[i].mean_of_means == s[i].mean_of_means);

  std::vector<RunRecord> flat{{"a", "f", 10, 0, 0, 3, {}}, {"b", "f", 10, 0, 0, 3, {}}};
  for (const auto& x : aggregate_normalized(flat)) CHECK(x.mean_of_means == 0.0);
}

TEST_CASE("property: identical optimizers get identical summaries, all in [0, 1]") {
  ExperimentSpec spec;
  spec.optimizers = {"random", "sobol"};
  spec.benchmarks = {"branin", "drop_wave", "levy13"};
  spec.budgets = {25};
  spec.repeats = 4;
  auto recs = run_experiment(spec);
  const auto n = recs.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (recs[i].optimizer != "sobol") continue;
    auto twin = recs[i];
    twin.optimizer = "sobol_twin";
    recs.push_back(twin);
  }
  std::map<std::string, double> m;
  for (const auto& s : aggregate_normalized(recs)) {
    CHECK(s.mean_of_means >= 0.0);
    CHECK(s.mean_of_means <= 1.0);
    m[s.optimizer] = s.mean_of_means;
  }
  CHECK(m["sobol"] == m["sobol_twin"]);
}

TEST_CASE("results CSV round trip") {
  std::vector<RunRecord> recs{{"hola", "branin", 25, 3, 99, 0.5, {}}, {"igr", "forrester", 50, 0, 1, -6.0, {}}};
  std::stringstream io;
  write_records_csv(recs, io);
  const auto back = read_records_csv(io);
  REQUIRE(back.size() == 2);
  CHECK(back[0].optimizer == "hola");
  CHECK(back[0].repeat == 3);
  CHECK(back[0].seed == 99);
  CHECK(back[1].best == -6.0);
  std::ostringstream summary;
  write_summary_csv(aggregate_normalized(back), summary);
  CHECK(summary.str().rfind("optimizer,budget,mean_of_means\n", 0) == 0);
}
