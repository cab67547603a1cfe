// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "cdnsim/fluid.hpp"

#include <algorithm>
#include <cmath>

#include "cdnsim/errors.hpp"

namespace cdnsim {

FluidModel::FluidModel(SystemSpec spec, ConfigTable table)
    : spec_(std::move(spec)), table_(std::move(table)) {
  entries_with_content_.assign(static_cast<std::size_t>(spec_.num_contents()), {});
  for (int e = 0; e < static_cast<int>(table_.entries.size()); ++e) {
    const auto& entry = table_.entries[static_cast<std::size_t>(e)];
    const double alpha =
        spec_.classes[static_cast<std::size_t>(entry.class_index)].fraction;
    if (!(alpha * entry.weight > 0.0) && !entry.contents.empty())
      throw InfeasibleSpec("configuration entry carries no population mass");
    for (int c : entry.contents)
      entries_with_content_[static_cast<std::size_t>(c)].push_back(e);
  }
}

std::vector<std::vector<double>> FluidModel::drift(const ConfigState& state) const {
  const std::size_t ne = table_.entries.size();
  std::vector<std::vector<double>> h(ne);

  // Free mass per content: sum over configurations holding it of
  // class_fraction * weight * (1 - tail at full bandwidth).
  const int m = spec_.num_contents();
  std::vector<double> free_mass(static_cast<std::size_t>(m), 0.0);
  std::vector<char> any_unsaturated(static_cast<std::size_t>(m), 0);
  for (std::size_t e = 0; e < ne; ++e) {
    const auto& entry = table_.entries[e];
    const int u = spec_.classes[static_cast<std::size_t>(entry.class_index)].bandwidth;
    const double alpha =
        spec_.classes[static_cast<std::size_t>(entry.class_index)].fraction;
    const double top = state.tails[e][static_cast<std::size_t>(u)];
    for (int c : entry.contents) {
      free_mass[static_cast<std::size_t>(c)] += alpha * entry.weight * (1.0 - top);
      if (top < 1.0) any_unsaturated[static_cast<std::size_t>(c)] = 1;
    }
  }

  for (std::size_t e = 0; e < ne; ++e) {
    const auto& entry = table_.entries[e];
    const auto& cls = spec_.classes[static_cast<std::size_t>(entry.class_index)];
    const int u = cls.bandwidth;
    const double alpha_q = cls.fraction * entry.weight;
    const auto& tail = state.tails[e];
    auto& he = h[e];
    he.assign(static_cast<std::size_t>(u) + 1, 0.0);

    const bool saturated = tail[static_cast<std::size_t>(u)] >= 1.0;
    if (saturated) {
      // Every level is pinned at 1, so only the top coordinate is live:
      // departures run at rate u there. Hold the level while the entry's
      // inflow bound covers them, otherwise let the uncovered departures
      // drain it. This picks the inclusion element that realizes the
      // sliding solution once the projection re-imposes the chain.
      double inflow_cap = 0.0;
      for (int c : entry.contents)
        inflow_cap += spec_.per_server_rates[static_cast<std::size_t>(c)] / alpha_q;
      he[static_cast<std::size_t>(u)] = std::min(0.0, inflow_cap - u);
      continue;
    }

    for (int r = 1; r <= u; ++r) {
      const double gap = tail[static_cast<std::size_t>(r) - 1] - tail[static_cast<std::size_t>(r)];
      double arrivals = 0.0;
      for (int c : entry.contents) {
        const double denom = free_mass[static_cast<std::size_t>(c)];
        if (denom <= 0.0) {
          if (any_unsaturated[static_cast<std::size_t>(c)])
            throw DegenerateDenominator(
                "content " + std::to_string(c + 1) +
                " has zero free mass with unsaturated configurations");
          continue;
        }
        arrivals += spec_.per_server_rates[static_cast<std::size_t>(c)] * gap / denom;
      }
      const double next = r < u ? tail[static_cast<std::size_t>(r) + 1] : 0.0;
      he[static_cast<std::size_t>(r)] =
          arrivals - r * (tail[static_cast<std::size_t>(r)] - next);
    }
  }
  return h;
}

Trajectory FluidModel::integrate(const ConfigState& start, double horizon,
                                 double dt, const FluidOptions& opts) const {
  if (!(dt > 0.0)) throw Error("integration step must be positive");
  ConfigState state = start;
  project_state(state);
  if (!is_valid_state(table_, spec_, state, 1e-9))
    throw ProjectionFailure("initial state does not match the configuration table");

  Trajectory out;
  const auto steps = static_cast<long long>(std::ceil(horizon / dt - 1e-12));
  out.times.reserve(static_cast<std::size_t>(steps) + 1);
  out.y.reserve(static_cast<std::size_t>(steps) + 1);
  out.times.push_back(0.0);
  out.y.push_back(aggregate_load(state));
  if (opts.state_stride > 0) out.states.push_back(state);

  for (long long k = 1; k <= steps; ++k) {
    // Final step may be partial when the horizon is not a grid multiple.
    const double step_dt =
        std::min(dt, horizon - static_cast<double>(k - 1) * dt);
    const auto h = drift(state);
    for (std::size_t e = 0; e < state.tails.size(); ++e)
      for (std::size_t r = 1; r < state.tails[e].size(); ++r)
        state.tails[e][r] += step_dt * h[e][r];
    project_state(state);

    out.times.push_back(std::min(static_cast<double>(k) * dt, horizon));
    out.y.push_back(aggregate_load(state));
    if (opts.state_stride > 0 && k % opts.state_stride == 0)
      out.states.push_back(state);
  }
  out.final_state = std::move(state);
  return out;
}

double FluidModel::drift_bound() const {
  int u_max = 0;
  for (const auto& cls : spec_.classes) u_max = std::max(u_max, cls.bandwidth);
  double sum = 0.0;
  for (const auto& entry : table_.entries) {
    const auto& cls = spec_.classes[static_cast<std::size_t>(entry.class_index)];
    const double alpha_q = cls.fraction * entry.weight;
    double per_entry = 0.0;
    for (int c : entry.contents)
      per_entry += spec_.per_server_rates[static_cast<std::size_t>(c)] / alpha_q;
    per_entry += static_cast<double>(u_max);
    sum += 1.0 + cls.bandwidth * per_entry * per_entry;
  }
  return std::sqrt(sum);
}

double content_load_closed_form(double rate, double cap, double y0, double t) {
  if (y0 < 0.0 || y0 > cap)
    throw BadInitialValue("initial load must lie in [0, cap]");
  const double unconstrained = rate + (y0 - rate) * std::exp(-t);
  return std::min(unconstrained, cap);
}

StationaryResult stationary(const SystemSpec& spec, PolicyKind policy) {
  const double rho = spec.load;
  StationaryResult result;
  result.y_inf = std::min(spec.per_server_total, spec.per_server_total / rho);
  result.blocking_floor = std::max(0.0, 1.0 - 1.0 / rho);

  switch (policy) {
    case PolicyKind::greedy: {
      result.per_content = greedy_capacity(spec).per_content;
      return result;
    }
    case PolicyKind::p2p: {
      for (const auto& cls : spec.classes)
        if (cls.cache_size != 1)
          throw UnsupportedRegime(
              "product-weighted placement has a stationary characterization "
              "only for single-slot caches");
      result.per_content.reserve(spec.per_server_rates.size());
      for (double lam : spec.per_server_rates)
        result.per_content.push_back(std::min(lam, lam / rho));
      return result;
    }
    case PolicyKind::unif:
      throw UnsupportedRegime(
          "uniform placement has no stationary characterization; predict it "
          "by simulation");
  }
  throw UnsupportedRegime("unknown policy");
}

}  // namespace cdnsim
