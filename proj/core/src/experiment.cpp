// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "cdnsim/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <thread>

#include "cdnsim/errors.hpp"
#include "cdnsim/fluid.hpp"
#include "cdnsim/io.hpp"
#include "cdnsim/svg.hpp"
#include "json.hpp"

#ifndef CDNSIM_GIT_DESCRIBE
#define CDNSIM_GIT_DESCRIBE "unknown"
#endif

namespace cdnsim {

namespace {
using nlohmann::json;
}

std::string to_string(PlanName name) {
  switch (name) {
    case PlanName::n_sweep: return "n-sweep";
    case PlanName::rho_sweep: return "rho-sweep";
    case PlanName::eta_sweep: return "eta-sweep";
    case PlanName::m_sweep: return "m-sweep";
    case PlanName::table1: return "table1";
    case PlanName::table2: return "table2";
    case PlanName::fluid_vs_sim: return "fluid-vs-sim";
  }
  return "?";
}

PlanName plan_from_string(const std::string& name) {
  if (name == "n-sweep") return PlanName::n_sweep;
  if (name == "rho-sweep") return PlanName::rho_sweep;
  if (name == "eta-sweep") return PlanName::eta_sweep;
  if (name == "m-sweep") return PlanName::m_sweep;
  if (name == "table1") return PlanName::table1;
  if (name == "table2") return PlanName::table2;
  if (name == "fluid-vs-sim") return PlanName::fluid_vs_sim;
  throw MalformedConfig("unknown experiment plan '" + name + "'");
}

namespace {

RunParams base_point(PlanName name) {
  RunParams base;  // reference workload: m=500, eta=2, d=2, u=1, 160k arrivals
  switch (name) {
    case PlanName::table2:
      base.policy = PolicyKind::greedy;
      break;
    case PlanName::fluid_vs_sim:
      base.policy = PolicyKind::greedy;
      base.n = 1000;
      base.m = 5;
      base.eta = 1.0;
      base.rho = 1.5;
      base.d = 1;
      base.u = 2;
      base.arrivals = 60000;
      break;
    default:
      break;
  }
  return base;
}

const std::vector<PolicyKind> kAllPolicies = {PolicyKind::greedy, PolicyKind::p2p,
                                              PolicyKind::unif};

}  // namespace

ExperimentPlan default_plan(PlanName name) {
  ExperimentPlan plan;
  plan.name = name;
  const RunParams base = base_point(name);
  switch (name) {
    case PlanName::n_sweep:
      for (PolicyKind policy : kAllPolicies)
        for (long n : {10L, 20L, 50L, 200L, 1000L, 2000L}) {
          RunParams p = base;
          p.policy = policy;
          p.n = n;
          plan.points.push_back(p);
        }
      break;
    case PlanName::rho_sweep:
      for (PolicyKind policy : kAllPolicies)
        for (double rho : {0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6}) {
          RunParams p = base;
          p.policy = policy;
          p.rho = rho;
          plan.points.push_back(p);
        }
      break;
    case PlanName::eta_sweep:
      for (PolicyKind policy : kAllPolicies)
        for (double eta : {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0}) {
          RunParams p = base;
          p.policy = policy;
          p.eta = eta;
          plan.points.push_back(p);
        }
      break;
    case PlanName::m_sweep:
      for (PolicyKind policy : kAllPolicies)
        for (int m : {100, 200, 300, 500, 700, 1000}) {
          RunParams p = base;
          p.policy = policy;
          p.m = m;
          plan.points.push_back(p);
        }
      break;
    case PlanName::table1:
      for (long n : {10L, 20L, 50L, 200L, 1000L, 2000L}) {
        RunParams p = base;
        p.n = n;
        plan.points.push_back(p);
      }
      break;
    case PlanName::table2:
      for (ServiceDist dist : {ServiceDist::exponential, ServiceDist::constant,
                               ServiceDist::lognormal, ServiceDist::pareto})
        for (auto [n, rho] : std::vector<std::pair<long, double>>{
                 {400, 0.4}, {400, 0.8}, {400, 1.2}, {400, 1.6}, {1000, 0.4}}) {
          RunParams p = base;
          p.dist = dist;
          p.n = n;
          p.rho = rho;
          plan.points.push_back(p);
        }
      break;
    case PlanName::fluid_vs_sim:
      plan.points.push_back(base);
      break;
  }
  return plan;
}

namespace {

RunParams params_from_json(const json& obj, RunParams base) {
  if (obj.contains("policy")) base.policy = policy_from_string(obj["policy"].get<std::string>());
  if (obj.contains("dist")) base.dist = dist_from_string(obj["dist"].get<std::string>());
  if (obj.contains("n")) base.n = obj["n"].get<long>();
  if (obj.contains("m")) base.m = obj["m"].get<int>();
  if (obj.contains("rho")) base.rho = obj["rho"].get<double>();
  if (obj.contains("eta")) base.eta = obj["eta"].get<double>();
  if (obj.contains("d")) base.d = obj["d"].get<int>();
  if (obj.contains("u")) base.u = obj["u"].get<int>();
  if (obj.contains("arrivals")) base.arrivals = obj["arrivals"].get<long long>();
  if (obj.contains("warmup")) base.warmup = obj["warmup"].get<double>();
  return base;
}

json params_to_json(const RunParams& p) {
  json obj;
  obj["policy"] = to_string(p.policy);
  obj["dist"] = to_string(p.dist);
  obj["n"] = p.n;
  obj["m"] = p.m;
  obj["rho"] = p.rho;
  obj["eta"] = p.eta;
  obj["d"] = p.d;
  obj["u"] = p.u;
  obj["arrivals"] = p.arrivals;
  obj["warmup"] = p.warmup;
  return obj;
}

std::vector<RunParams> expand_axes(const json& axes, const RunParams& base) {
  std::vector<RunParams> points{base};
  auto expand = [&points](const json& values, auto&& apply) {
    std::vector<RunParams> next;
    next.reserve(points.size() * values.size());
    for (const auto& value : values)
      for (RunParams p : points) {
        apply(p, value);
        next.push_back(p);
      }
    points = std::move(next);
  };
  if (axes.contains("policy"))
    expand(axes["policy"], [](RunParams& p, const json& v) {
      p.policy = policy_from_string(v.get<std::string>());
    });
  if (axes.contains("dist"))
    expand(axes["dist"], [](RunParams& p, const json& v) {
      p.dist = dist_from_string(v.get<std::string>());
    });
  if (axes.contains("n"))
    expand(axes["n"], [](RunParams& p, const json& v) { p.n = v.get<long>(); });
  if (axes.contains("m"))
    expand(axes["m"], [](RunParams& p, const json& v) { p.m = v.get<int>(); });
  if (axes.contains("rho"))
    expand(axes["rho"], [](RunParams& p, const json& v) { p.rho = v.get<double>(); });
  if (axes.contains("eta"))
    expand(axes["eta"], [](RunParams& p, const json& v) { p.eta = v.get<double>(); });
  if (axes.contains("d"))
    expand(axes["d"], [](RunParams& p, const json& v) { p.d = v.get<int>(); });
  if (axes.contains("u"))
    expand(axes["u"], [](RunParams& p, const json& v) { p.u = v.get<int>(); });
  return points;
}

}  // namespace

ExperimentPlan plan_from_json(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw MalformedConfig("plan is not valid JSON");
  if (!doc.contains("name")) throw MalformedConfig("plan needs a 'name'");

  ExperimentPlan plan = default_plan(plan_from_string(doc["name"].get<std::string>()));
  if (doc.contains("replications")) plan.replications = doc["replications"].get<int>();
  if (doc.contains("base_seed")) plan.base_seed = doc["base_seed"].get<std::uint64_t>();
  if (doc.contains("output_dir")) plan.output_dir = doc["output_dir"].get<std::string>();
  if (doc.contains("horizon")) plan.horizon = doc["horizon"].get<double>();
  if (doc.contains("dt")) plan.dt = doc["dt"].get<double>();
  if (doc.contains("sample_interval"))
    plan.sample_interval = doc["sample_interval"].get<double>();
  if (doc.contains("svg")) plan.svg = doc["svg"].get<bool>();
  if (doc.contains("workers")) plan.workers = doc["workers"].get<int>();

  RunParams base = base_point(plan.name);
  if (doc.contains("defaults")) base = params_from_json(doc["defaults"], base);
  if (doc.contains("points")) {
    plan.points.clear();
    for (const auto& obj : doc["points"])
      plan.points.push_back(params_from_json(obj, base));
  } else if (doc.contains("axes")) {
    plan.points = expand_axes(doc["axes"], base);
  }
  return plan;
}

std::string plan_to_json(const ExperimentPlan& plan) {
  json doc;
  doc["name"] = to_string(plan.name);
  doc["replications"] = plan.replications;
  doc["base_seed"] = plan.base_seed;
  doc["output_dir"] = plan.output_dir;
  doc["horizon"] = plan.horizon;
  doc["dt"] = plan.dt;
  doc["sample_interval"] = plan.sample_interval;
  doc["svg"] = plan.svg;
  doc["workers"] = plan.workers;
  json points = json::array();
  for (const auto& p : plan.points) points.push_back(params_to_json(p));
  doc["points"] = std::move(points);
  return doc.dump(2);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t point,
                          std::uint64_t rep) {
  std::uint64_t h = mix64(base ^ 0x243f6a8885a308d3ULL);
  h = mix64(h ^ (point + 0x13198a2e03707344ULL));
  h = mix64(h ^ (rep + 0xa4093822299f31d0ULL));
  return h;
}

Metrics run_point(const RunParams& params, std::uint64_t seed) {
  const SystemSpec spec =
      make_sweep_spec(params.n, params.m, params.eta, params.rho, params.d, params.u);

  // Separate streams: placement sampling and simulation must not share
  // randomness, or changing one would silently shift the other.
  const std::uint64_t alloc_seed = derive_seed(seed, 0, 1);
  const std::uint64_t sim_seed = derive_seed(seed, 0, 2);

  Allocation alloc;
  switch (params.policy) {
    case PolicyKind::greedy: alloc = greedy_caches(spec); break;
    case PolicyKind::p2p: alloc = sample_p2p(spec, alloc_seed); break;
    case PolicyKind::unif: alloc = sample_unif(spec, alloc_seed); break;
  }

  SimOptions opts;
  opts.dist = params.dist;
  opts.num_arrivals = params.arrivals;
  opts.seed = sim_seed;
  opts.warmup_fraction = params.warmup;
  return simulate(spec, alloc, opts);
}

std::string metrics_csv_header() {
  return "policy,matching,n,m,rho,eta,dist,seed,arrivals,blocked,blocking_prob";
}

std::string metrics_csv_row(const RunParams& params, std::uint64_t seed,
                            const Metrics& metrics) {
  std::ostringstream row;
  row << to_string(params.policy) << ",ras," << params.n << ',' << params.m << ',';
  char num[64];
  std::snprintf(num, sizeof(num), "%g", params.rho);
  row << num << ',';
  std::snprintf(num, sizeof(num), "%g", params.eta);
  row << num << ',' << to_string(params.dist) << ',' << seed << ','
      << metrics.arrivals << ',' << metrics.blocked << ',';
  std::snprintf(num, sizeof(num), "%.6f", metrics.blocking_prob());
  row << num;
  return row.str();
}

std::string trajectory_csv(const std::vector<TrajectorySample>& samples) {
  std::ostringstream out;
  out << "t,y\n";
  char buf[96];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g\n", s.t, s.y);
    out << buf;
  }
  return out.str();
}

namespace {

// Axis of a sweep plot, by plan.
double plot_x(PlanName name, const RunParams& p) {
  switch (name) {
    case PlanName::rho_sweep: return p.rho;
    case PlanName::eta_sweep: return p.eta;
    case PlanName::m_sweep: return static_cast<double>(p.m);
    default: return static_cast<double>(p.n);
  }
}

std::string plot_xlabel(PlanName name) {
  switch (name) {
    case PlanName::rho_sweep: return "load";
    case PlanName::eta_sweep: return "popularity decay";
    case PlanName::m_sweep: return "contents";
    default: return "servers";
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentPlan& plan) {
  if (plan.points.empty()) throw MalformedConfig("plan has no grid points");
  if (plan.replications < 1)
    throw MalformedConfig("plan needs at least one replication");

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(plan.output_dir, ec);
  if (ec) throw IoFailure("cannot create output directory " + plan.output_dir);

  const bool overlay = plan.name == PlanName::fluid_vs_sim;

  ExperimentResult result;
  const std::size_t cells =
      plan.points.size() * static_cast<std::size_t>(plan.replications);
  result.rows.resize(cells);
  std::vector<Metrics> cell_metrics(overlay ? cells : 0);

  for (std::size_t i = 0; i < cells; ++i) {
    auto& rec = result.rows[i];
    rec.point = static_cast<int>(i / static_cast<std::size_t>(plan.replications));
    rec.replication = static_cast<int>(i % static_cast<std::size_t>(plan.replications));
    rec.params = plan.points[static_cast<std::size_t>(rec.point)];
    rec.seed = derive_seed(plan.base_seed, static_cast<std::uint64_t>(rec.point),
                           static_cast<std::uint64_t>(rec.replication));
  }

  std::atomic<std::size_t> cursor{0};
  auto work = [&] {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= cells) return;
      auto& rec = result.rows[i];
      try {
        Metrics metrics;
        if (overlay) {
          const SystemSpec spec =
              make_sweep_spec(rec.params.n, rec.params.m, rec.params.eta,
                              rec.params.rho, rec.params.d, rec.params.u);
          SimOptions opts;
          opts.dist = rec.params.dist;
          opts.num_arrivals = rec.params.arrivals;
          opts.seed = derive_seed(rec.seed, 0, 2);
          opts.warmup_fraction = rec.params.warmup;
          opts.sample_interval = plan.sample_interval;
          opts.max_time = plan.horizon;
          metrics = simulate(spec, greedy_caches(spec), opts);
          cell_metrics[i] = metrics;
        } else {
          metrics = run_point(rec.params, rec.seed);
        }
        rec.csv_row = metrics_csv_row(rec.params, rec.seed, metrics);
        rec.blocking = metrics.blocking_prob();
      } catch (const std::exception& e) {
        rec.error = e.what();
      }
    }
  };

  int workers = plan.workers > 0
                    ? plan.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(cells)));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();

  // Single collector writes rows in (point, replication) order.
  std::ostringstream csv;
  csv << metrics_csv_header() << '\n';
  int line = 0;
  std::vector<int> csv_line(cells, -1);
  for (std::size_t i = 0; i < cells; ++i) {
    if (!result.rows[i].error.empty()) {
      ++result.failed;
      continue;
    }
    csv << result.rows[i].csv_row << '\n';
    csv_line[i] = ++line;
  }
  const std::string csv_path = plan.output_dir + "/results.csv";
  write_text_file(csv_path, csv.str());
  result.outputs.push_back("results.csv");

  if (overlay) {
    const RunParams& p = plan.points.front();
    const SystemSpec spec = make_sweep_spec(p.n, p.m, p.eta, p.rho, p.d, p.u);
    const FluidModel model(spec, config_fractions(p.policy, spec));
    const Trajectory fluid =
        model.integrate(model.empty_state(), plan.horizon, plan.dt);
    std::vector<TrajectorySample> fluid_samples;
    fluid_samples.reserve(fluid.times.size());
    for (std::size_t k = 0; k < fluid.times.size(); ++k)
      fluid_samples.push_back({fluid.times[k], fluid.y[k]});
    write_text_file(plan.output_dir + "/fluid_traj.csv",
                    trajectory_csv(fluid_samples));
    result.outputs.push_back("fluid_traj.csv");
    for (std::size_t i = 0; i < cells; ++i) {
      if (!result.rows[i].error.empty()) continue;
      const std::string name =
          "sim_traj_" + std::to_string(result.rows[i].replication) + ".csv";
      write_text_file(plan.output_dir + "/" + name,
                      trajectory_csv(cell_metrics[i].trajectory));
      result.outputs.push_back(name);
    }
    if (plan.svg) {
      std::vector<PlotSeries> series;
      PlotSeries fl{"fluid", {}, false};
      for (std::size_t k = 0; k < fluid.times.size(); ++k)
        fl.points.emplace_back(fluid.times[k], fluid.y[k]);
      series.push_back(std::move(fl));
      for (std::size_t i = 0; i < cells && i < 4; ++i) {
        if (!result.rows[i].error.empty()) continue;
        PlotSeries sim{"sim seed " + std::to_string(result.rows[i].replication),
                       {},
                       false};
        for (const auto& s : cell_metrics[i].trajectory)
          sim.points.emplace_back(s.t, s.y);
        series.push_back(std::move(sim));
      }
      PlotOptions opts;
      opts.title = "normalized load, fluid vs simulation";
      opts.xlabel = "time";
      opts.ylabel = "y";
      write_text_file(plan.output_dir + "/fluid_vs_sim.svg",
                      render_line_plot(series, opts));
      result.outputs.push_back("fluid_vs_sim.svg");
    }
  } else if (plan.svg) {
    // Mean blocking per point, one series per (policy, dist) pair.
    std::map<std::string, PlotSeries> by_label;
    for (std::size_t point = 0; point < plan.points.size(); ++point) {
      double sum = 0.0;
      int ok = 0;
      for (int r = 0; r < plan.replications; ++r) {
        const auto& rec =
            result.rows[point * static_cast<std::size_t>(plan.replications) +
                        static_cast<std::size_t>(r)];
        if (rec.error.empty()) {
          sum += rec.blocking;
          ++ok;
        }
      }
      if (ok == 0) continue;
      const RunParams& p = plan.points[point];
      std::string label = to_string(p.policy);
      if (plan.name == PlanName::table2) label = to_string(p.dist);
      auto& series = by_label[label];
      series.label = label;
      series.points.emplace_back(plot_x(plan.name, p), sum / ok);
    }
    std::vector<PlotSeries> series;
    for (auto& [label, s] : by_label) {
      std::sort(s.points.begin(), s.points.end());
      series.push_back(std::move(s));
    }
    PlotOptions opts;
    opts.title = to_string(plan.name);
    opts.xlabel = plot_xlabel(plan.name);
    opts.ylabel = "blocking probability";
    // Log-log on fleet-size sweeps makes the convergence rate a straight line.
    opts.logx = plan.name == PlanName::n_sweep || plan.name == PlanName::table1;
    opts.logy = opts.logx;
    const std::string svg_name = to_string(plan.name) + ".svg";
    write_text_file(plan.output_dir + "/" + svg_name,
                    render_line_plot(series, opts));
    result.outputs.push_back(svg_name);
  }

  json manifest;
  manifest["plan"] = json::parse(plan_to_json(plan));
  manifest["git_describe"] = CDNSIM_GIT_DESCRIBE;
  json rows = json::array();
  for (std::size_t i = 0; i < cells; ++i) {
    const auto& rec = result.rows[i];
    json row;
    row["point"] = rec.point;
    row["replication"] = rec.replication;
    row["params"] = params_to_json(rec.params);
    row["seed"] = rec.seed;
    if (rec.error.empty()) {
      row["outputs"]["file"] = "results.csv";
      row["outputs"]["line"] = csv_line[i];
    } else {
      row["error"] = rec.error;
    }
    rows.push_back(std::move(row));
  }
  manifest["rows"] = std::move(rows);
  write_text_file(plan.output_dir + "/manifest.json", manifest.dump(2));
  result.outputs.push_back("manifest.json");
  return result;
}

}  // namespace cdnsim
