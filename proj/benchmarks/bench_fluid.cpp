// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <benchmark/benchmark.h>

#include "cdnsim/fluid.hpp"

namespace {

using namespace cdnsim;

void BM_DriftEval(benchmark::State& state) {
  const SystemSpec spec =
      make_sweep_spec(400, static_cast<int>(state.range(0)), 1.2, 0.8, 2, 1);
  ConfigOptions copts;
  copts.max_entries = 1u << 20;
  const FluidModel model(spec, config_fractions(PolicyKind::p2p, spec, copts));
  ConfigState w = model.empty_state();
  for (auto& tail : w.tails) tail[1] = 0.5;
  for (auto _ : state) {
    auto h = model.drift(w);
    benchmark::DoNotOptimize(h.size());
  }
  state.SetLabel(std::to_string(model.table().entries.size()) + " configs");
}
BENCHMARK(BM_DriftEval)->Arg(20)->Arg(100)->Arg(300);

void BM_Integrate(benchmark::State& state) {
  const SystemSpec spec = make_sweep_spec(400, 50, 1.2, 1.3, 1, 1);
  const FluidModel model(spec, config_fractions(PolicyKind::greedy, spec));
  for (auto _ : state) {
    auto traj = model.integrate(model.empty_state(), 5.0, 1e-3);
    benchmark::DoNotOptimize(traj.y.back());
  }
}
BENCHMARK(BM_Integrate);

}  // namespace
