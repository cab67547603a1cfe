// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <benchmark/benchmark.h>

#include "cdnsim/policies.hpp"
#include "cdnsim/sim.hpp"

namespace {

using namespace cdnsim;

void BM_Simulate(benchmark::State& state) {
  const long n = state.range(0);
  const SystemSpec spec = make_sweep_spec(n, 500, 2.0, 0.8, 2, 1);
  const Allocation alloc = sample_p2p(spec, 1);
  SimOptions opts;
  opts.num_arrivals = 20000;
  for (auto _ : state) {
    opts.seed += 1;
    auto metrics = simulate(spec, alloc, opts);
    benchmark::DoNotOptimize(metrics.blocked);
  }
  state.SetItemsProcessed(state.iterations() * opts.num_arrivals);
}
BENCHMARK(BM_Simulate)->Arg(100)->Arg(400)->Arg(1000);

void BM_SampleCaches(benchmark::State& state) {
  const SystemSpec spec = make_sweep_spec(state.range(0), 500, 2.0, 0.8, 2, 1);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto alloc = sample_p2p(spec, ++seed);
    benchmark::DoNotOptimize(alloc.stored.size());
  }
}
BENCHMARK(BM_SampleCaches)->Arg(400)->Arg(2000);

}  // namespace
