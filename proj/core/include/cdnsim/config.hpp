// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <vector>

#include "cdnsim/model.hpp"

namespace cdnsim {

/// A cache configuration: servers of one class holding one particular
/// content set. `weight` is the fraction of that class in this
/// configuration (limiting or empirical).
struct ConfigEntry {
  int class_index = 0;
  std::vector<int> contents;  // sorted 0-based content ids; may be empty
  double weight = 0.0;

  bool operator==(const ConfigEntry&) const = default;
};

struct ConfigTable {
  std::vector<ConfigEntry> entries;

  bool operator==(const ConfigTable&) const = default;
};

/// Occupancy tail fractions, parallel to a ConfigTable: tails[e][r] is the
/// fraction of entry-e servers serving at least r requests,
/// r = 0..bandwidth. Valid states satisfy
/// 1 = tails[e][0] >= tails[e][1] >= ... >= tails[e][U] >= 0.
struct ConfigState {
  std::vector<std::vector<double>> tails;

  bool operator==(const ConfigState&) const = default;
};

/// All-idle state shaped for the table.
ConfigState zero_state(const ConfigTable& table, const SystemSpec& spec);

/// Shape plus monotone-chain check (within tolerance).
bool is_valid_state(const ConfigTable& table, const SystemSpec& spec,
                    const ConfigState& state, double tol = 1e-12);

/// Clips each tail to [0, 1] and restores the monotone chain by a running
/// minimum from r = 0 upward. Throws ProjectionFailure on non-finite input.
void project_state(ConfigState& state);

/// Normalized total load: sum over entries of
/// class_fraction * weight * sum_{r>=1} tails[r].
double aggregate_load(const ConfigTable& table, const SystemSpec& spec,
                      const ConfigState& state);

/// Same restricted to entries whose content set includes `content`.
double content_load(const ConfigTable& table, const SystemSpec& spec,
                    const ConfigState& state, int content);

}  // namespace cdnsim
