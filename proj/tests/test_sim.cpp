// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <algorithm>
#include <cmath>

#include "cdnsim/errors.hpp"
#include "cdnsim/policies.hpp"
#include "cdnsim/rng.hpp"
#include "cdnsim/sim.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace cdnsim;

namespace {

SystemSpec single_class(long n, int u, int d, std::vector<double> rates) {
  ServerClass cls;
  cls.bandwidth = u;
  cls.cache_size = d;
  cls.fraction = 1.0;
  return make_spec(n, {cls}, std::move(rates), FleetMode::fractions);
}

Allocation store_everywhere(const SystemSpec& spec) {
  Allocation alloc;
  std::vector<int> all(static_cast<std::size_t>(spec.num_contents()));
  for (int c = 0; c < spec.num_contents(); ++c) all[static_cast<std::size_t>(c)] = c;
  alloc.stored.assign(static_cast<std::size_t>(spec.n), all);
  return alloc;
}

}  // namespace

TEST_SUITE_BEGIN("sim");

TEST_CASE("service samples have unit mean") {
  for (ServiceDist dist : {ServiceDist::exponential, ServiceDist::constant,
                           ServiceDist::lognormal, ServiceDist::pareto}) {
    Rng rng(100 + static_cast<std::uint64_t>(dist));
    double sum = 0.0;
    const int draws = 1000000;
    for (int i = 0; i < draws; ++i) sum += sample_service(dist, rng);
    CHECK(sum / draws == doctest::Approx(1.0).epsilon(0.01));
  }
}

TEST_CASE("constant service is exactly one") {
  Rng rng(1);
  for (int i = 0; i < 10; ++i) CHECK(sample_service(ServiceDist::constant, rng) == 1.0);
}

TEST_CASE("heavy-tailed service never dips under its scale") {
  Rng rng(2);
  double smallest = 1e9;
  for (int i = 0; i < 100000; ++i)
    smallest = std::min(smallest, sample_service(ServiceDist::pareto, rng));
  CHECK(smallest >= 0.9);
  CHECK(smallest < 0.92);  // the scale point is actually approached
}

TEST_CASE("exponential tail probability matches the closed form") {
  Rng rng(3);
  const int draws = 1000000;
  int over = 0;
  for (int i = 0; i < draws; ++i)
    if (sample_service(ServiceDist::exponential, rng) > 1.0) ++over;
  CHECK(static_cast<double>(over) / draws ==
        doctest::Approx(std::exp(-1.0)).epsilon(0.005 / std::exp(-1.0)));
}

TEST_CASE("empty caches block everything") {
  const SystemSpec spec = single_class(3, 1, 1, {1.0, 0.5});
  Allocation alloc;
  alloc.stored.assign(3, {});
  SimOptions opts;
  opts.num_arrivals = 5000;
  const Metrics metrics = simulate(spec, alloc, opts);
  CHECK(metrics.arrivals == 5000);
  CHECK(metrics.blocked == metrics.arrivals);
  CHECK(metrics.blocking_prob() == doctest::Approx(1.0));
}

TEST_CASE("single loss server matches the classic blocking formula") {
  const SystemSpec one = single_class(1, 1, 1, {1.0});
  SimOptions opts;
  opts.num_arrivals = 160000;
  opts.seed = 11;
  const Metrics m1 = simulate(one, store_everywhere(one), opts);
  const double b1 = m1.blocking_prob();
  CHECK(oracles::erlang_b(1, 1.0) == doctest::Approx(0.5));
  CHECK(b1 == doctest::Approx(0.5).epsilon(0.02));  // +-0.01 absolute
  CHECK(std::abs(b1 - 0.5) <= 0.01);
  // The accepted rate and the unit service mean pin the mean occupancy.
  CHECK(std::abs(m1.time_avg_in_service - (1.0 - b1)) <= 0.01);

  const SystemSpec two = single_class(1, 2, 1, {1.0});
  const double b2 = simulate(two, store_everywhere(two), opts).blocking_prob();
  CHECK(oracles::erlang_b(2, 1.0) == doctest::Approx(0.2));
  CHECK(std::abs(b2 - 0.2) <= 0.01);
}

TEST_CASE("dispatch picks the only available server") {
  const SystemSpec spec = single_class(3, 1, 1, {1.0});
  Allocation alloc;
  alloc.stored = {{}, {0}, {}};
  LossSim sim(spec, alloc, {});
  REQUIRE(sim.availability(0).size() == 1);
  const auto server = sim.match(0);
  REQUIRE(server.has_value());
  CHECK(*server == 1);
  CHECK(sim.availability(0).empty());  // bandwidth 1, now saturated
  CHECK(sim.match(0) == std::nullopt);
  sim.release(1);
  CHECK(sim.availability(0).size() == 1);
}

TEST_CASE("dispatch draws uniformly over available servers") {
  const SystemSpec spec = single_class(3, 1, 1, {1.0});
  Allocation alloc;
  alloc.stored = {{0}, {}, {0}};
  LossSim sim(spec, alloc, {});
  std::vector<long long> counts(3, 0);
  for (int i = 0; i < 100000; ++i) {
    const auto server = sim.match(0);
    REQUIRE(server.has_value());
    ++counts[static_cast<std::size_t>(*server)];
    sim.release(*server);
  }
  CHECK(counts[1] == 0);
  const double stat = oracles::chi_square_stat({counts[0], counts[2]}, {0.5, 0.5});
  CHECK(stat < oracles::chi_square_crit_99(1));
}

TEST_CASE("blocked requests leave no trace in the occupancy") {
  const SystemSpec spec = single_class(2, 1, 1, {5.0});
  Allocation alloc;
  alloc.stored = {{0}, {0}};
  LossSim sim(spec, alloc, {});
  CHECK(sim.match(0).has_value());
  CHECK(sim.match(0).has_value());
  CHECK(sim.match(0) == std::nullopt);
  CHECK(sim.total_in_service() == 2);
}

TEST_CASE("runs are reproducible bit for bit") {
  std::vector<double> rates = zipf_rates(10, 1.0);
  for (double& r : rates) r *= 30.0;
  const SystemSpec loaded = single_class(20, 2, 2, rates);
  const Allocation alloc = sample_p2p(loaded, 77);
  SimOptions opts;
  opts.num_arrivals = 20000;
  opts.seed = 1234;
  opts.sample_interval = 0.5;
  const Metrics a = simulate(loaded, alloc, opts);
  const Metrics b = simulate(loaded, alloc, opts);
  CHECK(a == b);
  opts.seed = 1235;
  CHECK_FALSE(simulate(loaded, alloc, opts) == a);
}

TEST_CASE("counters balance and capacities hold throughout") {
  std::vector<double> rates = zipf_rates(6, 1.2);
  for (double& r : rates) r *= 25.0;
  const SystemSpec spec = single_class(10, 2, 2, rates);
  const Allocation alloc = sample_p2p(spec, 5);
  SimOptions opts;
  opts.num_arrivals = 3000;
  opts.seed = 9;
  LossSim sim(spec, alloc, opts);
  while (sim.step()) {
    for (int s = 0; s < 10; ++s) {
      CHECK(sim.in_service(s) >= 0);
      CHECK(sim.in_service(s) <= 2);
    }
  }
  const Metrics metrics = sim.finish();
  CHECK(metrics.arrivals == 3000);
  CHECK(metrics.blocked <= metrics.arrivals);
  long long per_content = 0;
  for (long long a : metrics.per_content_arrivals) per_content += a;
  CHECK(per_content == metrics.arrivals);
}

TEST_CASE("warm-up arrivals are excluded from the counters") {
  const SystemSpec spec = single_class(1, 1, 1, {1.0});
  SimOptions opts;
  opts.num_arrivals = 1000;
  opts.warmup_fraction = 0.5;
  const Metrics metrics = simulate(spec, store_everywhere(spec), opts);
  CHECK(metrics.arrivals == 500);
}

TEST_CASE("allocation must fit the fleet") {
  const SystemSpec spec = single_class(2, 1, 1, {1.0});
  Allocation wrong_size;
  wrong_size.stored = {{0}};
  CHECK_THROWS_AS(simulate(spec, wrong_size, {}), AllocationMismatch);

  Allocation unknown;
  unknown.stored = {{0}, {3}};
  CHECK_THROWS_AS(simulate(spec, unknown, {}), AllocationMismatch);

  Allocation overfull;
  overfull.stored = {{0}, {0, 0}};
  CHECK_THROWS_AS(simulate(spec, overfull, {}), AllocationMismatch);
}

TEST_CASE("occupancy snapshot of an idle fleet") {
  const SystemSpec spec = single_class(4, 2, 1, {1.0, 1.0});
  Allocation alloc;
  alloc.stored = {{0}, {0}, {1}, {1}};
  LossSim sim(spec, alloc, {});
  const auto [table, state] = sim.occupancy_snapshot();
  REQUIRE(table.entries.size() == 2);
  for (const auto& tail : state.tails) {
    CHECK(tail[0] == 1.0);
    CHECK(tail[1] == 0.0);
    CHECK(tail[2] == 0.0);
  }
  CHECK(is_valid_state(table, spec, state));
}

TEST_CASE("occupancy snapshot counts partial service") {
  const SystemSpec spec = single_class(1, 2, 1, {1.0});
  Allocation alloc;
  alloc.stored = {{0}};
  LossSim sim(spec, alloc, {});
  REQUIRE(sim.match(0).has_value());
  const auto [table, state] = sim.occupancy_snapshot();
  REQUIRE(state.tails.size() == 1);
  CHECK(state.tails[0][1] == doctest::Approx(1.0));
  CHECK(state.tails[0][2] == doctest::Approx(0.0));
}

TEST_CASE("snapshots along a run stay inside the valid set") {
  std::vector<double> rates = zipf_rates(5, 2.0);
  for (double& r : rates) r *= 18.0;
  const SystemSpec spec = single_class(12, 3, 2, rates);
  const Allocation alloc = sample_unif(spec, 21);
  SimOptions opts;
  opts.num_arrivals = 2000;
  opts.seed = 3;
  LossSim sim(spec, alloc, opts);
  int checked = 0;
  while (sim.step()) {
    if (++checked % 97 == 0) {
      const auto [table, state] = sim.occupancy_snapshot();
      CHECK(is_valid_state(table, spec, state));
      double mass = 0.0;
      for (const auto& entry : table.entries)
        mass += spec.classes[static_cast<std::size_t>(entry.class_index)].fraction *
                entry.weight;
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("trajectory sampling tracks the normalized load on a grid") {
  std::vector<double> rates = {8.0};
  const SystemSpec spec = single_class(4, 2, 1, rates);
  SimOptions opts;
  opts.num_arrivals = 100000;
  opts.sample_interval = 0.25;
  opts.max_time = 5.0;
  opts.seed = 15;
  const Metrics metrics = simulate(spec, store_everywhere(spec), opts);
  REQUIRE(!metrics.trajectory.empty());
  CHECK(metrics.trajectory.front().t == 0.0);
  CHECK(metrics.trajectory.front().y == 0.0);
  for (std::size_t i = 0; i < metrics.trajectory.size(); ++i) {
    CHECK(metrics.trajectory[i].t == doctest::Approx(0.25 * static_cast<double>(i)));
    CHECK(metrics.trajectory[i].y >= 0.0);
    CHECK(metrics.trajectory[i].y <= 2.0);  // bandwidth per server
  }
  CHECK(metrics.trajectory.back().t == doctest::Approx(5.0).epsilon(0.1));
}

TEST_SUITE_END();
