// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cdnsim/policies.hpp"
#include "cdnsim/rng.hpp"
#include "cdnsim/sim.hpp"

namespace cdnsim {

enum class PlanName {
  n_sweep,
  rho_sweep,
  eta_sweep,
  m_sweep,
  table1,
  table2,
  fluid_vs_sim,
};

std::string to_string(PlanName name);
PlanName plan_from_string(const std::string& name);

/// One grid point of an experiment.
struct RunParams {
  PolicyKind policy = PolicyKind::p2p;
  ServiceDist dist = ServiceDist::exponential;
  long n = 400;
  int m = 500;
  double rho = 0.8;
  double eta = 2.0;
  int d = 2;
  int u = 1;
  long long arrivals = 160000;
  double warmup = 0.0;
};

struct ExperimentPlan {
  PlanName name = PlanName::n_sweep;
  std::vector<RunParams> points;
  int replications = 5;
  std::uint64_t base_seed = 1;
  std::string output_dir = "out";
  // Overlay settings, used by the fluid_vs_sim plan.
  double horizon = 10.0;
  double dt = 1e-3;
  double sample_interval = 0.05;
  bool svg = false;
  int workers = 0;  // 0 = hardware concurrency
};

/// Canonical plans with the reference parameter grids.
ExperimentPlan default_plan(PlanName name);

/// Plan document: {"name": ..., "replications": ..., "base_seed": ...,
/// "output_dir": ..., plus either "points": [{...}] (sparse objects merged
/// over the plan's base point) or "axes": {"n": [...], ...} expanded as a
/// cartesian product}.
ExperimentPlan plan_from_json(const std::string& text);
std::string plan_to_json(const ExperimentPlan& plan);

/// Avalanche mix of (base, point, replication); stable across releases so
/// manifests stay reproducible.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t point,
                          std::uint64_t rep);

/// Builds the instance and allocation for the point and runs one
/// simulation. The allocation sampler and the simulator consume separate
/// streams derived from the seed.
Metrics run_point(const RunParams& params, std::uint64_t seed);

std::string metrics_csv_header();
std::string metrics_csv_row(const RunParams& params, std::uint64_t seed,
                            const Metrics& metrics);
std::string trajectory_csv(const std::vector<TrajectorySample>& samples);

struct RunRecord {
  int point = 0;
  int replication = 0;
  RunParams params;
  std::uint64_t seed = 0;
  std::string csv_row;   // empty on failure
  std::string error;     // empty on success
  double blocking = 0.0;
};

struct ExperimentResult {
  std::vector<RunRecord> rows;
  int failed = 0;
  std::vector<std::string> outputs;  // files written, relative to output_dir
};

/// Runs every (point, replication) cell on a bounded worker pool and writes
/// results.csv, manifest.json and optional plots into plan.output_dir. Rows
/// land in deterministic (point, replication) order regardless of worker
/// scheduling; failed cells are recorded and skipped.
ExperimentResult run_experiment(const ExperimentPlan& plan);

}  // namespace cdnsim
