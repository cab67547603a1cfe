// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <vector>

#include "cdnsim/config.hpp"
#include "cdnsim/model.hpp"
#include "cdnsim/policies.hpp"

namespace cdnsim {

struct FluidOptions {
  // Keep every k-th intermediate state in the trajectory; 0 keeps only the
  // final state. The aggregate load series is always kept.
  int state_stride = 0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<double> y;  // aggregate normalized load per grid point
  std::vector<ConfigState> states;
  ConfigState final_state;
};

/// Large-fleet occupancy dynamics for a fixed configuration table.
///
/// The drift of an occupancy tail combines a popularity-weighted arrival
/// term, shared among unsaturated configurations storing the content in
/// proportion to their free mass, with a linear departure term. The arrival
/// term switches off at saturation, which makes the right-hand side a
/// differential inclusion rather than an ODE; integrate() realizes the
/// sliding solution by stepping the selected drift and projecting back onto
/// the valid state set after every step.
class FluidModel {
 public:
  FluidModel(SystemSpec spec, ConfigTable table);

  const ConfigTable& table() const { return table_; }
  const SystemSpec& spec() const { return spec_; }

  ConfigState empty_state() const { return zero_state(table_, spec_); }

  /// Selected drift, shaped like the state.
  std::vector<std::vector<double>> drift(const ConfigState& state) const;

  /// Projected explicit Euler with fixed step dt over [0, horizon].
  Trajectory integrate(const ConfigState& start, double horizon, double dt,
                       const FluidOptions& opts = {}) const;

  double aggregate_load(const ConfigState& state) const {
    return cdnsim::aggregate_load(table_, spec_, state);
  }
  double content_load(const ConfigState& state, int content) const {
    return cdnsim::content_load(table_, spec_, state, content);
  }

  /// Uniform 2-norm bound on the drift over the valid state set.
  double drift_bound() const;

 private:
  SystemSpec spec_;
  ConfigTable table_;
  std::vector<std::vector<int>> entries_with_content_;  // content -> entries
};

/// Closed-form per-content load: exponential approach to `rate` from y0,
/// clipped at the capacity `cap`. Requires 0 <= y0 <= cap.
double content_load_closed_form(double rate, double cap, double y0, double t);

struct StationaryResult {
  double y_inf = 0.0;                // limiting normalized load
  std::vector<double> per_content;   // limiting per-content loads
  double blocking_floor = 0.0;       // (1 - 1/load)^+
};

/// Limiting stationary point. Covered regimes: greedy (any cache size) and
/// the product-weighted policy with single-slot caches; anything else has
/// no fluid characterization here and is rejected.
StationaryResult stationary(const SystemSpec& spec, PolicyKind policy);

}  // namespace cdnsim
