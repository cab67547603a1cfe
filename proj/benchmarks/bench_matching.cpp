// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <benchmark/benchmark.h>

#include "cdnsim/matching.hpp"
#include "cdnsim/model.hpp"

namespace {

using namespace cdnsim;

void BM_GreedySolve(benchmark::State& state) {
  const long n = state.range(0);
  const SystemSpec spec = make_sweep_spec(n, 500, 2.0, 0.8, 2, 1);
  for (auto _ : state) {
    auto result = greedy_solve(spec);
    benchmark::DoNotOptimize(result.value);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_GreedySolve)->Arg(100)->Arg(400)->Arg(1000)->Arg(2000)->Complexity();

void BM_MaxMatching(benchmark::State& state) {
  const long n = state.range(0);
  const SystemSpec spec = make_sweep_spec(n, 200, 1.5, 0.9, 2, 1);
  const auto greedy = greedy_solve(spec);
  std::vector<int> bandwidths(static_cast<std::size_t>(n), 1);
  for (auto _ : state) {
    auto result = max_matching_value(greedy.alloc, spec.catalog.rates, bandwidths);
    benchmark::DoNotOptimize(result.value);
  }
}
BENCHMARK(BM_MaxMatching)->Arg(100)->Arg(400)->Arg(1000);

}  // namespace
