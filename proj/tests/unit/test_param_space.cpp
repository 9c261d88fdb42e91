#include <doctest.h>

#include <cmath>
#include <random>

#include "hola/param_space.hpp"

using namespace hola;

namespace {

Json example_params() {
  return Json::parse(R"({
    "n_estimators": {"min": 10, "max": 1000, "param_type": "int", "scale": "log", "grid": 10},
    "max_depth": {"values": [1, 3, 5, 7]},
    "learning_rate": {"min": 1e-4, "max": 1.0, "scale": "log"},
    "subsample": {"min": 0.2, "max": 1.0}
  })");
}

ParamSpec ranged(double lo, double hi) {
  ParamSpec s;
  s.name = "p";
  s.lower = lo;
  s.upper = hi;
  return s;
}

}  // namespace

TEST_CASE("example parameter document") {
  const auto space = ParamSpace::from_json(example_params());
  REQUIRE(space.dimension() == 4);
  CHECK(space.names() == std::vector<std::string>{"n_estimators", "max_depth", "learning_rate", "subsample"});
  CHECK(space.spec(0).scale == Scale::log);
  CHECK(space.spec(0).grid == 10);
  CHECK(space.spec(0).integer);
  CHECK(space.spec(1).values == std::vector<double>{1, 3, 5, 7});
  CHECK(space.spec(3).scale == Scale::linear);
  CHECK(ParamSpace::from_json(space.to_json()) == space);
}

TEST_CASE("invalid parameter documents") {
  auto bad = [](const char* text) { return ParamSpace::from_json(Json::parse(text)); };
  CHECK_THROWS_AS(bad(R"({"p":{"min":0,"max":1,"scale":"log"}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"p":{"values":[5]}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"p":{"values":[5,5]}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"p":{"min":1,"max":1}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"p":{"min":2,"max":1}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"p":{"min":0,"max":1,"grid":1}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"p":{"min":0.2,"max":0.8,"param_type":"int"}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"p":{"min":0,"max":1,"scale":"cubic"}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"p":{"min":0,"max":1,"colour":"red"}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"p":{"max":1}})"), ConfigError);
}

TEST_CASE("standardize") {
  const auto space = ParamSpace::from_json(example_params());
  CHECK(space.axis(3).standardize(0.6) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(space.axis(2).standardize(1e-2) == doctest::Approx(0.5).epsilon(1e-15));
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    CHECK(space.axis(i).standardize(space.spec(i).lower) == 0.0);
    CHECK(space.axis(i).standardize(space.spec(i).upper) == 1.0);
  }
  CHECK_THROWS_AS(space.axis(3).standardize(1.5), std::out_of_range);
}

TEST_CASE("unstandardize") {
  const auto space = ParamSpace::from_json(example_params());
  const auto& n_est = space.axis(0);
  CHECK(n_est.unstandardize(1.0) == 1000);
  // 10 * 100^(1/3) = 46.416 rounds to 46; 10 * 100^(2/3) = 215.443 rounds to 215.
  CHECK(n_est.unstandardize(3.0 / 9.0) == 46);
  CHECK(n_est.unstandardize(6.0 / 9.0) == 215);
  CHECK(ParamAxis(ranged(0, 10)).unstandardize(0.5) == 5);
  CHECK_THROWS_AS(n_est.unstandardize(0.3), std::invalid_argument);
  CHECK_THROWS_AS(ParamAxis(ranged(0, 10)).unstandardize(1.5), std::invalid_argument);
}

TEST_CASE("project") {
  auto grid = ranged(0, 10);
  grid.grid = 5;
  CHECK(ParamAxis(grid).project(0.3) == 0.25);
  CHECK(ParamAxis(grid).project(0.125) == 0.0);  // tie goes to the lower value
  const auto space = ParamSpace::from_json(example_params());
  const auto& depth = space.axis(1);
  CHECK(depth.project(0.4) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(depth.unstandardize(depth.project(0.4)) == 3);
  auto second = ranged(-5, 5);
  second.name = "q";
  const ParamSpace cont({ranged(0, 1), second});
  const std::vector<double> z{-0.2, 1.7};
  CHECK(cont.project(z) == std::vector<double>{0, 1});
}

TEST_CASE("valid value enumeration") {
  auto integer = ranged(1.2, 7.9);
  integer.integer = true;
  CHECK(enumerate_valid(integer) == std::vector<double>{2, 3, 4, 5, 6, 7});
  auto grid = ranged(0, 10);
  grid.grid = 5;
  CHECK(enumerate_valid(grid) == std::vector<double>{0, 2.5, 5, 7.5, 10});
  ParamSpec set;
  set.name = "v";
  set.values = {7, 1, 5, 3};
  CHECK(enumerate_valid(set) == std::vector<double>{1, 3, 5, 7});
  auto log_grid = ranged(10, 1000);
  log_grid.scale = Scale::log;
  log_grid.grid = 3;
  const auto v = enumerate_valid(log_grid);
  REQUIRE(v.size() == 3);
  CHECK(v[1] == doctest::Approx(100).epsilon(1e-12));
  CHECK_THROWS(enumerate_valid(ranged(0, 1)));
}

TEST_CASE("integer grid keeps distinct anchors that collapse after rounding") {
  auto p = ranged(1, 3);
  p.integer = true;
  p.grid = 5;  // 1, 1.5, 2, 2.5, 3 -> rounded
  const ParamAxis axis(p);
  for (double z : axis.valid_positions()) {
    const double x = axis.unstandardize(z);
    CHECK(x == std::round(x));
    CHECK(axis.contains(x));
  }
}

TEST_CASE("log value set is positioned on the log scale") {
  ParamSpec p;
  p.name = "lr";
  p.values = {0.001, 0.01, 0.1};
  p.scale = Scale::log;
  const ParamAxis axis(p);
  CHECK(axis.valid_positions()[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("maps by name") {
  const auto space = ParamSpace::from_json(example_params());
  const ParamMap m{{"n_estimators", 100}, {"max_depth", 3}, {"learning_rate", 0.1}, {"subsample", 0.5}};
  const auto x = space.vector_from(m);
  CHECK(x == std::vector<double>{100, 3, 0.1, 0.5});
  CHECK(space.map_from(x) == m);
  CHECK_THROWS(space.vector_from({{"n_estimators", 100}}));
}

TEST_CASE("property: projection is idempotent and lands in the space") {
  const auto space = ParamSpace::from_json(example_params());
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  for (int rep = 0; rep < 20000; ++rep) {
    std::vector<double> z(space.dimension());
    for (auto& v : z) v = u(rng);
    const auto p = space.project(z);
    CHECK(space.project(p) == p);
    CHECK(space.contains(space.unstandardize(p)));
  }
}

TEST_CASE("property: round trip on valid raw points") {
  const auto space = ParamSpace::from_json(example_params());
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0, 1);
  for (int rep = 0; rep < 20000; ++rep) {
    std::vector<double> z(space.dimension());
    for (auto& v : z) v = u(rng);
    const auto x = space.to_raw(z);
    const auto back = space.unstandardize(space.project(space.standardize(x)));
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-9));
    }
  }
}
