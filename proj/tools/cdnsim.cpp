// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

// Command line front end: instance I/O, placement solving, simulation,
// fluid prediction and experiment sweeps.
//
// Exit codes: 0 success, 2 validation or input failure, 3 a sweep finished
// with failed grid points.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cdnsim/errors.hpp"
#include "cdnsim/experiment.hpp"
#include "cdnsim/fluid.hpp"
#include "cdnsim/io.hpp"
#include "cdnsim/matching.hpp"
#include "cdnsim/policies.hpp"
#include "cdnsim/sim.hpp"
#include "json.hpp"

namespace {

using namespace cdnsim;

struct InstanceArgs {
  std::string file;
  long n = 400;
  int m = 500;
  double rho = 0.8;
  double eta = 2.0;
  int d = 2;
  int u = 1;
  bool inline_given = false;
};

void add_instance_options(CLI::App* cmd, InstanceArgs& args) {
  auto* file = cmd->add_option("--instance", args.file, "instance JSON file");
  auto* n = cmd->add_option("--n", args.n, "server count (default 400)");
  cmd->add_option("--m", args.m, "catalog size (default 500)");
  cmd->add_option("--rho", args.rho, "offered load (default 0.8)");
  cmd->add_option("--eta", args.eta, "popularity decay (default 2)");
  cmd->add_option("--d", args.d, "cache slots per server (default 2)");
  cmd->add_option("--u", args.u, "bandwidth per server (default 1)");
  n->excludes(file);
}

SystemSpec resolve_instance(const InstanceArgs& args) {
  if (!args.file.empty()) return load_spec(args.file);
  return make_sweep_spec(args.n, args.m, args.eta, args.rho, args.d, args.u);
}

void emit(const std::string& text, const std::string& output) {
  if (output.empty())
    std::cout << text << '\n';
  else
    write_text_file(output, text);
}

// Deterministic relative perturbation that breaks popularity ties while
// preserving the existing order (earlier contents get the bigger boost).
SystemSpec jitter_rates(const SystemSpec& spec) {
  std::vector<double> rates = spec.catalog.rates;
  const int m = static_cast<int>(rates.size());
  for (int c = 0; c < m; ++c)
    rates[static_cast<std::size_t>(c)] *= 1.0 + 1e-9 * (m - c) / m;
  return make_spec(spec.n, spec.classes, std::move(rates), spec.mode);
}

int run_solve(const InstanceArgs& instance, bool exact, int limit_n, int limit_m,
              const std::string& output) {
  const SystemSpec spec = resolve_instance(instance);
  if (exact) {
    const ExactResult result = exact_solve(spec, {limit_n, limit_m});
    emit(solve_result_to_json(result.value, result.alloc, {}), output);
  } else {
    const GreedyResult result = greedy_solve(spec);
    emit(solve_result_to_json(result.value, result.alloc, result.trace), output);
  }
  return 0;
}

int run_allocate(const InstanceArgs& instance, const std::string& policy,
                 std::uint64_t seed, const std::string& output) {
  const SystemSpec spec = resolve_instance(instance);
  Allocation alloc;
  switch (policy_from_string(policy)) {
    case PolicyKind::greedy: alloc = greedy_caches(spec); break;
    case PolicyKind::p2p: alloc = sample_p2p(spec, seed); break;
    case PolicyKind::unif: alloc = sample_unif(spec, seed); break;
  }
  emit(allocation_to_json(alloc), output);
  return 0;
}

int run_simulate(const InstanceArgs& instance, const std::string& alloc_file,
                 const std::string& policy, std::uint64_t alloc_seed,
                 const SimOptions& opts, const RunParams& row_params,
                 const std::string& trajectory_file, const std::string& output) {
  const SystemSpec spec = resolve_instance(instance);
  Allocation alloc;
  if (!alloc_file.empty()) {
    alloc = load_allocation(alloc_file);
    if (alloc.num_servers() < spec.n)
      alloc.stored.resize(static_cast<std::size_t>(spec.n));
  } else {
    switch (policy_from_string(policy)) {
      case PolicyKind::greedy: alloc = greedy_caches(spec); break;
      case PolicyKind::p2p: alloc = sample_p2p(spec, alloc_seed); break;
      case PolicyKind::unif: alloc = sample_unif(spec, alloc_seed); break;
    }
  }
  const Metrics metrics = simulate(spec, alloc, opts);

  RunParams params = row_params;
  params.policy = policy_from_string(policy);
  params.dist = opts.dist;
  params.arrivals = opts.num_arrivals;
  params.warmup = opts.warmup_fraction;
  emit(metrics_csv_header() + "\n" + metrics_csv_row(params, opts.seed, metrics),
       output);
  if (!trajectory_file.empty())
    write_text_file(trajectory_file, trajectory_csv(metrics.trajectory));
  return 0;
}

int run_fluid(const InstanceArgs& instance, const std::string& policy,
              double horizon, double dt, double sample_every, bool jitter,
              std::size_t max_configs, const std::string& trajectory_file,
              const std::string& output) {
  SystemSpec spec = resolve_instance(instance);
  if (jitter) spec = jitter_rates(spec);
  const PolicyKind kind = policy_from_string(policy);

  nlohmann::json doc;
  try {
    const StationaryResult st = stationary(spec, kind);
    doc["stationary"]["y_inf"] = st.y_inf;
    doc["stationary"]["blocking_floor"] = st.blocking_floor;
    doc["stationary"]["per_content"] = st.per_content;
  } catch (const UnsupportedRegime& e) {
    doc["stationary"] = nullptr;
    doc["stationary_note"] = e.what();
  }

  if (!trajectory_file.empty()) {
    ConfigOptions copts;
    copts.max_entries = max_configs;
    const FluidModel model(spec, config_fractions(kind, spec, copts));
    const Trajectory traj = model.integrate(model.empty_state(), horizon, dt);
    std::vector<TrajectorySample> samples;
    const auto stride = std::max<std::size_t>(
        1, static_cast<std::size_t>(sample_every / dt + 0.5));
    for (std::size_t k = 0; k < traj.times.size(); k += stride)
      samples.push_back({traj.times[k], traj.y[k]});
    write_text_file(trajectory_file, trajectory_csv(samples));
    doc["trajectory"] = trajectory_file;
    doc["y_final"] = traj.y.back();
  }
  emit(doc.dump(2), output);
  return 0;
}

int run_reduce3p(const std::vector<double>& sizes, double target, bool check,
                 const std::string& output) {
  const SystemSpec spec = three_partition_instance(sizes, target);
  emit(spec_to_json(spec), output);
  if (check) {
    const double groups = static_cast<double>(sizes.size()) / 3.0;
    const ExactResult exact = exact_solve(
        spec, {static_cast<int>(spec.n), spec.num_contents()});
    const double bound = groups * target;
    std::fprintf(stderr, "exact value %.9g of bound %.9g -> %s\n", exact.value,
                 bound, exact.value >= bound - 1e-9 ? "partitionable"
                                                    : "not partitionable");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cache placement and request matching toolkit"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "greedy or exact joint placement");
  InstanceArgs solve_instance;
  add_instance_options(solve, solve_instance);
  bool exact = false;
  int limit_n = 4, limit_m = 4;
  std::string solve_out;
  solve->add_flag("--exact", exact, "exhaustive solver (guarded)");
  solve->add_option("--limit-n", limit_n, "exact solver server guard");
  solve->add_option("--limit-m", limit_m, "exact solver content guard");
  solve->add_option("-o,--output", solve_out, "write JSON here instead of stdout");

  // allocate
  auto* allocate = app.add_subcommand("allocate", "sample or compute caches");
  InstanceArgs alloc_instance;
  add_instance_options(allocate, alloc_instance);
  std::string alloc_policy = "p2p";
  std::uint64_t alloc_seed = 1;
  std::string alloc_out;
  allocate->add_option("--policy", alloc_policy, "greedy | p2p | unif");
  allocate->add_option("--seed", alloc_seed, "sampling seed");
  allocate->add_option("-o,--output", alloc_out, "write JSON here instead of stdout");

  // simulate
  auto* sim = app.add_subcommand("simulate", "one event-driven run");
  InstanceArgs sim_instance;
  add_instance_options(sim, sim_instance);
  std::string sim_alloc_file, sim_policy = "p2p", sim_dist = "exp";
  std::string sim_matching = "ras";
  std::string sim_traj, sim_out;
  SimOptions sim_opts;
  std::uint64_t sim_alloc_seed = 1;
  sim->add_option("--alloc", sim_alloc_file, "allocation JSON (else sampled)");
  sim->add_option("--policy", sim_policy, "greedy | p2p | unif");
  sim->add_option("--alloc-seed", sim_alloc_seed, "placement sampling seed");
  sim->add_option("--matching", sim_matching, "request matching policy (ras)");
  sim->add_option("--dist", sim_dist, "exp | const | lognorm | pareto");
  sim->add_option("--arrivals", sim_opts.num_arrivals, "arrivals to simulate");
  sim->add_option("--seed", sim_opts.seed, "simulation seed");
  sim->add_option("--warmup", sim_opts.warmup_fraction,
                  "arrival fraction excluded from counters");
  sim->add_option("--sample-interval", sim_opts.sample_interval,
                  "trajectory grid step (0 = off)");
  sim->add_option("--max-time", sim_opts.max_time, "stop the clock here");
  sim->add_option("--trajectory", sim_traj, "write t,y samples to this CSV");
  sim->add_option("-o,--output", sim_out, "write the CSV row here");

  // fluid
  auto* fluid = app.add_subcommand("fluid", "limiting dynamics and stationary point");
  InstanceArgs fluid_instance;
  add_instance_options(fluid, fluid_instance);
  std::string fluid_policy = "greedy", fluid_traj, fluid_out;
  double horizon = 10.0, fluid_dt = 1e-3, fluid_sample = 0.05;
  bool jitter = false;
  std::size_t max_configs = 1u << 16;
  fluid->add_option("--policy", fluid_policy, "greedy | p2p | unif");
  fluid->add_option("--horizon", horizon, "integration horizon");
  fluid->add_option("--dt", fluid_dt, "integration step");
  fluid->add_option("--sample-interval", fluid_sample, "trajectory output step");
  fluid->add_flag("--jitter", jitter,
                  "break popularity ties by a relative 1e-9 perturbation");
  fluid->add_option("--max-configs", max_configs,
                    "guard on the configuration table size");
  fluid->add_option("--trajectory", fluid_traj, "write t,y samples to this CSV");
  fluid->add_option("-o,--output", fluid_out, "write JSON here instead of stdout");

  // experiment
  auto* exp = app.add_subcommand("experiment", "run a parameter sweep");
  std::string plan_name, plan_file, exp_output;
  int replications = 0;
  std::uint64_t base_seed = 0;
  bool svg = false;
  int workers = 0;
  exp->add_option("--name", plan_name,
                  "n-sweep | rho-sweep | eta-sweep | m-sweep | table1 | table2 | "
                  "fluid-vs-sim");
  exp->add_option("--plan", plan_file, "plan JSON file");
  exp->add_option("--output", exp_output, "output directory");
  exp->add_option("--replications", replications, "replications per grid point");
  exp->add_option("--base-seed", base_seed, "root seed for the sweep");
  exp->add_flag("--svg", svg, "also render plots");
  exp->add_option("--workers", workers, "worker pool size (0 = hardware)");

  // reduce-3p
  auto* reduce = app.add_subcommand(
      "reduce-3p", "instance from element sizes and a group target");
  std::vector<double> sizes;
  double target = 0.0;
  bool check = false;
  std::string reduce_out;
  reduce->add_option("--sizes", sizes, "3k element sizes")->required();
  reduce->add_option("--target", target, "per-group target sum")->required();
  reduce->add_flag("--check", check, "solve exactly and report partitionability");
  reduce->add_option("-o,--output", reduce_out, "write JSON here instead of stdout");

  try {
    app.parse(argc, argv);

    if (*solve)
      return run_solve(solve_instance, exact, limit_n, limit_m, solve_out);
    if (*allocate)
      return run_allocate(alloc_instance, alloc_policy, alloc_seed, alloc_out);
    if (*sim) {
      if (sim_matching != "ras")
        throw MalformedConfig("only the 'ras' matching policy is implemented");
      sim_opts.dist = dist_from_string(sim_dist);
      RunParams row;
      row.n = sim_instance.file.empty() ? sim_instance.n : load_spec(sim_instance.file).n;
      row.m = sim_instance.m;
      row.rho = sim_instance.rho;
      row.eta = sim_instance.eta;
      row.d = sim_instance.d;
      row.u = sim_instance.u;
      return run_simulate(sim_instance, sim_alloc_file, sim_policy,
                          sim_alloc_seed, sim_opts, row, sim_traj, sim_out);
    }
    if (*fluid)
      return run_fluid(fluid_instance, fluid_policy, horizon, fluid_dt,
                       fluid_sample, jitter, max_configs, fluid_traj, fluid_out);
    if (*exp) {
      if (plan_name.empty() == plan_file.empty())
        throw MalformedConfig("give exactly one of --name or --plan");
      ExperimentPlan plan = plan_file.empty()
                                ? default_plan(plan_from_string(plan_name))
                                : plan_from_json(read_text_file(plan_file));
      if (!exp_output.empty()) plan.output_dir = exp_output;
      if (exp->count("--replications") > 0) plan.replications = replications;
      if (exp->count("--base-seed") > 0) plan.base_seed = base_seed;
      if (svg) plan.svg = true;
      if (workers > 0) plan.workers = workers;
      const ExperimentResult result = run_experiment(plan);
      std::fprintf(stderr, "%zu rows, %d failed -> %s\n",
                   result.rows.size(), result.failed, plan.output_dir.c_str());
      return result.failed == 0 ? 0 : 3;
    }
    if (*reduce) return run_reduce3p(sizes, target, check, reduce_out);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
