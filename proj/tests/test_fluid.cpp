// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <algorithm>
#include <cmath>

#include "cdnsim/errors.hpp"
#include "cdnsim/fluid.hpp"
#include "cdnsim/rng.hpp"
#include "doctest.h"

using namespace cdnsim;

namespace {

SystemSpec single_class(long n, int u, int d, std::vector<double> rates) {
  ServerClass cls;
  cls.bandwidth = u;
  cls.cache_size = d;
  cls.fraction = 1.0;
  return make_spec(n, {cls}, std::move(rates), FleetMode::fractions);
}

// Single content served by one class of bandwidth u, with a configuration
// weight sized so the capacity cap equals `cap`; the rest of the class
// idles on empty caches.
FluidModel capped_model(double rate, double cap, int u) {
  const SystemSpec spec = single_class(100, u, 1, {rate * 100.0});
  const double q = cap / static_cast<double>(u);
  ConfigTable table;
  table.entries.push_back({0, {0}, q});
  if (q < 1.0) table.entries.push_back({0, {}, 1.0 - q});
  return FluidModel(spec, std::move(table));
}

// State whose aggregate load is y0, filled bottom level first.
ConfigState state_with_load(const FluidModel& model, double y0) {
  ConfigState state = model.empty_state();
  const auto& entry = model.table().entries.front();
  double remaining = y0 / entry.weight;  // single class, fraction 1
  for (std::size_t r = 1; r < state.tails[0].size(); ++r) {
    state.tails[0][r] = std::clamp(remaining, 0.0, 1.0);
    remaining -= 1.0;
  }
  return state;
}

}  // namespace

TEST_SUITE_BEGIN("fluid");

TEST_CASE("drift of the empty state is pure arrival pressure") {
  const FluidModel model = capped_model(2.0, 3.0, 3);
  const auto h = model.drift(model.empty_state());
  CHECK(h[0][1] == doctest::Approx(2.0));
  CHECK(h[0][2] == doctest::Approx(0.0));
  CHECK(h[0][3] == doctest::Approx(0.0));
}

TEST_CASE("aggregate drift vanishes where demand equals occupancy") {
  const FluidModel model = capped_model(2.0, 3.0, 3);
  const ConfigState state = state_with_load(model, 2.0);
  CHECK(model.aggregate_load(state) == doctest::Approx(2.0));
  const auto h = model.drift(state);
  double ydot = 0.0;
  for (std::size_t r = 1; r < h[0].size(); ++r) ydot += h[0][r];
  // y' = rate - y for the single-content model
  CHECK(ydot * model.table().entries[0].weight == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("saturated states with enough inflow sit still") {
  const FluidModel model = capped_model(4.0, 2.0, 2);  // overloaded content
  const ConfigState full = state_with_load(model, 2.0);
  CHECK(full.tails[0][2] == doctest::Approx(1.0));
  const auto h = model.drift(full);
  for (std::size_t r = 1; r < h[0].size(); ++r) CHECK(h[0][r] == 0.0);

  const Trajectory traj = model.integrate(full, 1.0, 1e-3);
  for (double y : traj.y) CHECK(y == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("corrupted occupancy beyond one trips the denominator check") {
  const SystemSpec spec = single_class(10, 1, 1, {5.0, 5.0});
  ConfigTable table;
  table.entries.push_back({0, {0}, 0.4});
  table.entries.push_back({0, {0, 1}, 0.6});
  const FluidModel model(spec, table);
  ConfigState bad = model.empty_state();
  bad.tails[0][1] = 0.5;  // unsaturated entry for content 0
  bad.tails[1][1] = 3.0;  // nonsense: inflates used mass past the total
  CHECK_THROWS_AS(model.drift(bad), DegenerateDenominator);
}

TEST_CASE("integration follows the capped exponential closed form") {
  const double rate = 1.0, cap = 0.5;
  const FluidModel model = capped_model(rate, cap, 3);
  const Trajectory traj = model.integrate(model.empty_state(), 10.0, 1e-3);
  double worst = 0.0;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double expect = content_load_closed_form(rate, cap, 0.0, traj.times[k]);
    worst = std::max(worst, std::abs(traj.y[k] - expect));
  }
  CHECK(worst <= 1e-3);
}

TEST_CASE("everything is served in the underloaded limit") {
  std::vector<double> rates = {4.0, 2.6, 1.4};  // load 0.8 on unit bandwidth
  const SystemSpec spec = single_class(10, 1, 1, rates);
  const FluidModel model(spec, config_fractions(PolicyKind::greedy, spec));
  const Trajectory traj = model.integrate(model.empty_state(), 15.0, 1e-3);
  CHECK(traj.y.back() == doctest::Approx(spec.per_server_total).epsilon(1e-3));
  // The served load can never pass the demand/capacity envelope.
  const double envelope =
      std::min(spec.per_server_total, spec.per_server_total / spec.load);
  for (double y : traj.y) CHECK(y <= envelope + 1e-3);
}

TEST_CASE("closed form evaluates its three regimes") {
  CHECK(content_load_closed_form(1.0, 0.5, 0.0, 0.5) ==
        doctest::Approx(1.0 - std::exp(-0.5)).epsilon(1e-12));
  CHECK(content_load_closed_form(1.0, 0.5, 0.0, 1.0) == doctest::Approx(0.5));
  CHECK(content_load_closed_form(1.0, 0.5, 0.25, 0.0) == doctest::Approx(0.25));
  CHECK_THROWS_AS(content_load_closed_form(1.0, 0.5, 0.75, 1.0), BadInitialValue);
}

TEST_CASE("the capped drift is one-sided Lipschitz with constant zero") {
  // Interval endpoints of the per-content inclusion at and below the cap.
  const double rate = 1.3, cap = 0.9;
  auto endpoints = [&](double y) {
    if (y < cap) return std::vector<double>{rate - y};
    return std::vector<double>{-y, rate - y};
  };
  for (double w1 : {0.0, 0.3, 0.6, 0.89, 0.9}) {
    for (double w2 : {0.0, 0.2, 0.5, 0.9}) {
      if (w1 == w2) continue;
      for (double z1 : endpoints(w1))
        for (double z2 : endpoints(w2)) CHECK((z1 - z2) * (w1 - w2) <= 1e-12);
    }
  }
}

TEST_CASE("per-content trajectories of the integrator match the closed form") {
  std::vector<double> rates = {10.0, 6.0, 4.0};  // load 2 on unit bandwidth
  const SystemSpec spec = single_class(10, 1, 1, rates);
  const FluidModel model(spec, config_fractions(PolicyKind::greedy, spec));
  const auto cap = greedy_capacity(spec);

  FluidOptions opts;
  opts.state_stride = 100;  // every 0.1 time units at dt 1e-3
  const Trajectory traj = model.integrate(model.empty_state(), 5.0, 1e-3, opts);
  REQUIRE(!traj.states.empty());
  const double envelope =
      std::min(spec.per_server_total, spec.per_server_total / spec.load);
  for (double y : traj.y) CHECK(y <= envelope + 1e-3);
  for (std::size_t s = 0; s < traj.states.size(); ++s) {
    const double t = 0.1 * static_cast<double>(s);
    for (int c = 0; c < spec.num_contents(); ++c) {
      const double expect = content_load_closed_form(
          spec.per_server_rates[static_cast<std::size_t>(c)],
          cap.per_content[static_cast<std::size_t>(c)], 0.0, t);
      CHECK(std::abs(model.content_load(traj.states[s], c) - expect) <= 5e-3);
    }
  }
}

TEST_CASE("integrated states never leave the valid set") {
  const SystemSpec spec = single_class(10, 2, 2, {6.0, 5.0, 4.0, 3.0});
  const FluidModel model(spec, config_fractions(PolicyKind::p2p, spec));
  Rng rng(606);
  for (int trial = 0; trial < 20; ++trial) {
    ConfigState start = model.empty_state();
    for (auto& tail : start.tails) {
      for (std::size_t r = 1; r < tail.size(); ++r) tail[r] = rng.uniform01();
      std::sort(tail.begin() + 1, tail.end(), std::greater<>());
    }
    FluidOptions opts;
    opts.state_stride = 50;
    const Trajectory traj = model.integrate(start, 2.0, 1e-2, opts);
    for (const auto& state : traj.states)
      CHECK(is_valid_state(model.table(), spec, state, 1e-9));
    CHECK(is_valid_state(model.table(), spec, traj.final_state, 1e-9));
  }
}

TEST_CASE("drift stays under the uniform bound") {
  const SystemSpec spec = single_class(10, 2, 2, {6.0, 5.0, 4.0, 3.0});
  const FluidModel model(spec, config_fractions(PolicyKind::p2p, spec));
  const double bound = model.drift_bound();
  Rng rng(707);
  for (int trial = 0; trial < 2000; ++trial) {
    ConfigState state = model.empty_state();
    for (auto& tail : state.tails) {
      if (rng.uniform01() < 0.15) {
        std::fill(tail.begin(), tail.end(), 1.0);
        continue;
      }
      for (std::size_t r = 1; r < tail.size(); ++r) tail[r] = rng.uniform01();
      std::sort(tail.begin() + 1, tail.end(), std::greater<>());
    }
    const auto h = model.drift(state);
    double norm2 = 0.0;
    for (const auto& he : h)
      for (double v : he) norm2 += v * v;
    CHECK(std::sqrt(norm2) <= bound);
  }
}

TEST_CASE("stationary point under light load is full service") {
  const SystemSpec spec = single_class(10, 1, 1, {4.0, 2.6, 1.4});
  const StationaryResult st = stationary(spec, PolicyKind::greedy);
  CHECK(st.y_inf == doctest::Approx(spec.per_server_total));
  CHECK(st.blocking_floor == 0.0);
  CHECK(st.per_content[0] == doctest::Approx(0.4));
}

TEST_CASE("stationary blocking floor above load one") {
  const SystemSpec spec = make_sweep_spec(100, 20, 1.0, 1.2, 1, 1);
  const StationaryResult st = stationary(spec, PolicyKind::greedy);
  CHECK(st.blocking_floor == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(st.y_inf == doctest::Approx(spec.per_server_total / 1.2).epsilon(1e-12));
}

TEST_CASE("stationary per-content loads under overload") {
  const SystemSpec spec = single_class(10, 1, 1, {10.0, 6.0, 4.0});
  const StationaryResult st = stationary(spec, PolicyKind::greedy);
  CHECK(st.per_content[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(st.per_content[1] == doctest::Approx(4.0 / 15.0).epsilon(1e-12));
  CHECK(st.per_content[2] == doctest::Approx(1.0 / 15.0).epsilon(1e-12));

  const StationaryResult p2p = stationary(spec, PolicyKind::p2p);
  CHECK(p2p.per_content[0] == doctest::Approx(0.5));
  CHECK(p2p.y_inf == doctest::Approx(1.0));
  CHECK(p2p.blocking_floor == doctest::Approx(0.5));
}

TEST_CASE("uncharacterized regimes are rejected") {
  const SystemSpec wide = single_class(10, 1, 2, {10.0, 6.0, 4.0});
  CHECK_THROWS_AS(stationary(wide, PolicyKind::p2p), UnsupportedRegime);
  CHECK_THROWS_AS(stationary(wide, PolicyKind::unif), UnsupportedRegime);
}

TEST_SUITE_END();
