// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <cmath>

#include "cdnsim/errors.hpp"
#include "cdnsim/io.hpp"
#include "cdnsim/model.hpp"
#include "cdnsim/rng.hpp"
#include "doctest.h"

using namespace cdnsim;

TEST_SUITE_BEGIN("model");

TEST_CASE("zipf weights match the power law") {
  const auto w = zipf_rates(3, 2.0);
  CHECK(w[0] == doctest::Approx(36.0 / 49.0).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(9.0 / 49.0).epsilon(1e-12));
  CHECK(w[2] == doctest::Approx(4.0 / 49.0).epsilon(1e-12));
}

TEST_CASE("zipf with zero decay is uniform") {
  const auto w = zipf_rates(4, 0.0);
  for (double v : w) CHECK(v == doctest::Approx(0.25));
}

TEST_CASE("zipf of one content is the whole mass") {
  const auto w = zipf_rates(1, 7.0);
  REQUIRE(w.size() == 1);
  CHECK(w[0] == doctest::Approx(1.0));
}

TEST_CASE("zipf is a strictly decreasing probability vector") {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 1 + static_cast<int>(rng.below(200));
    const double eta = 0.1 + 3.0 * rng.uniform01();
    const auto w = zipf_rates(m, eta);
    double sum = 0.0;
    for (std::size_t c = 0; c < w.size(); ++c) {
      CHECK(w[c] > 0.0);
      if (c > 0) CHECK(w[c] < w[c - 1]);
      sum += w[c];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("load-targeted zipf catalog hits the load") {
  const SystemSpec spec = make_sweep_spec(400, 500, 2.0, 0.8, 2, 1);
  CHECK(spec.load == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(system_load(spec) == spec.load);
  CHECK(spec.n == 400);
  CHECK(spec.catalog.size() == 500);
}

TEST_CASE("single-server count mode derives n") {
  ServerClass cls;
  cls.bandwidth = 1;
  cls.cache_size = 1;
  cls.count = 1;
  const SystemSpec spec = make_spec(0, {cls}, {1.0}, FleetMode::counts);
  CHECK(spec.n == 1);
  CHECK(spec.load == doctest::Approx(1.0));
}

TEST_CASE("fractions must sum to one") {
  ServerClass a, b;
  a.fraction = 0.5;
  b.fraction = 0.6;
  CHECK_THROWS_AS(make_spec(10, {a, b}, {1.0}, FleetMode::fractions),
                  InfeasibleSpec);
}

TEST_CASE("system load is total rate over fleet bandwidth") {
  ServerClass cls;
  cls.bandwidth = 1;
  cls.cache_size = 1;
  cls.count = 2;
  const SystemSpec two = make_spec(2, {cls}, {1.0, 0.6}, FleetMode::counts);
  CHECK(system_load(two) == doctest::Approx(0.8));

  ServerClass big;
  big.bandwidth = 5;
  big.cache_size = 1;
  big.count = 1;
  const SystemSpec one = make_spec(1, {big}, {5.0}, FleetMode::counts);
  CHECK(system_load(one) == doctest::Approx(1.0));

  const SystemSpec sweep = make_sweep_spec(400, 500, 2.0, 1.2, 2, 1);
  CHECK(sweep.catalog.total() == doctest::Approx(480.0));
  CHECK(sweep.load == doctest::Approx(1.2).epsilon(1e-14));
}

TEST_CASE("load scales linearly with the rates") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const double kappa = 0.25 + 4.0 * rng.uniform01();
    std::vector<double> rates, scaled;
    for (int c = 0; c < 5; ++c) {
      rates.push_back(0.5 + rng.uniform01());
      scaled.push_back(rates.back() * kappa);
    }
    ServerClass cls;
    cls.bandwidth = 2;
    cls.cache_size = 1;
    cls.fraction = 1.0;
    const SystemSpec base = make_spec(3, {cls}, rates, FleetMode::fractions);
    const SystemSpec stretched = make_spec(3, {cls}, scaled, FleetMode::fractions);
    CHECK(stretched.load == doctest::Approx(kappa * base.load).epsilon(1e-12));
  }
}

TEST_CASE("largest remainder rounding preserves the fleet size") {
  ServerClass a, b, c;
  a.fraction = 0.5;
  b.fraction = 0.3;
  c.fraction = 0.2;
  a.bandwidth = b.bandwidth = c.bandwidth = 1;
  a.cache_size = b.cache_size = c.cache_size = 1;
  const SystemSpec spec = make_spec(7, {a, b, c}, {1.0}, FleetMode::fractions);
  CHECK(spec.classes[0].count == 4);  // 3.5 rounds up on the largest remainder
  CHECK(spec.classes[1].count == 2);
  CHECK(spec.classes[2].count == 1);
  CHECK(spec.explicit_fleet().size() == 7);
}

TEST_CASE("explicit fleet lists servers class by class") {
  ServerClass a, b;
  a.bandwidth = 10;
  a.cache_size = 1;
  a.count = 1;
  b.bandwidth = 5;
  b.cache_size = 2;
  b.count = 1;
  const SystemSpec spec = make_spec(2, {a, b}, {8, 4, 3}, FleetMode::counts);
  const auto fleet = spec.explicit_fleet();
  REQUIRE(fleet.size() == 2);
  CHECK(fleet[0].bandwidth == 10);
  CHECK(fleet[1].cache_size == 2);
  CHECK(spec.classes[0].fraction == doctest::Approx(0.5));
}

TEST_CASE("instance JSON round-trips") {
  ServerClass a, b;
  a.bandwidth = 2;
  a.cache_size = 3;
  a.fraction = 0.375;
  b.bandwidth = 1;
  b.cache_size = 1;
  b.fraction = 0.625;
  const SystemSpec spec =
      make_spec(16, {a, b}, {1.25, 0.5, 0.125}, FleetMode::fractions);
  CHECK(parse_spec(spec_to_json(spec)) == spec);

  ServerClass c;
  c.bandwidth = 4;
  c.cache_size = 2;
  c.count = 3;
  const SystemSpec counted = make_spec(0, {c}, {0.7, 0.3}, FleetMode::counts);
  CHECK(parse_spec(spec_to_json(counted)) == counted);
}

TEST_CASE("instance parser reports structural problems") {
  CHECK_THROWS_AS(parse_spec("not json"), MalformedConfig);
  CHECK_THROWS_AS(parse_spec("{\"n\": 4}"), MalformedConfig);
  CHECK_THROWS_AS(
      parse_spec(R"({"n": 2,
        "classes": [{"bandwidth": 1, "cache_size": 1, "fraction": 0.5},
                    {"bandwidth": 1, "cache_size": 1, "count": 1}],
        "catalog": {"rates": [1.0]}})"),
      MalformedConfig);
  CHECK_THROWS_AS(
      parse_spec(R"({"n": 2,
        "classes": [{"bandwidth": 1, "cache_size": 1, "fraction": 1.0}],
        "catalog": {"rates": [1.0, -2.0]}})"),
      InfeasibleSpec);
}

TEST_CASE("generator catalog accepts rho or total_rate") {
  const SystemSpec by_rho = parse_spec(
      R"({"n": 10,
          "classes": [{"bandwidth": 2, "cache_size": 1, "fraction": 1.0}],
          "catalog": {"generator": {"m": 4, "eta": 1.0, "rho": 0.5}}})");
  CHECK(by_rho.load == doctest::Approx(0.5).epsilon(1e-14));

  const SystemSpec by_total = parse_spec(
      R"({"n": 10,
          "classes": [{"bandwidth": 2, "cache_size": 1, "fraction": 1.0}],
          "catalog": {"generator": {"m": 4, "eta": 1.0, "total_rate": 10.0}}})");
  CHECK(by_total.catalog.total() == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_SUITE_END();
