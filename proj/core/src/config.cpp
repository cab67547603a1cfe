// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "cdnsim/config.hpp"

#include <algorithm>
#include <cmath>

#include "cdnsim/errors.hpp"

namespace cdnsim {

ConfigState zero_state(const ConfigTable& table, const SystemSpec& spec) {
  ConfigState state;
  state.tails.reserve(table.entries.size());
  for (const auto& entry : table.entries) {
    const int u = spec.classes[static_cast<std::size_t>(entry.class_index)].bandwidth;
    std::vector<double> tail(static_cast<std::size_t>(u) + 1, 0.0);
    tail[0] = 1.0;
    state.tails.push_back(std::move(tail));
  }
  return state;
}

bool is_valid_state(const ConfigTable& table, const SystemSpec& spec,
                    const ConfigState& state, double tol) {
  if (state.tails.size() != table.entries.size()) return false;
  for (std::size_t e = 0; e < state.tails.size(); ++e) {
    const int u =
        spec.classes[static_cast<std::size_t>(table.entries[e].class_index)].bandwidth;
    const auto& tail = state.tails[e];
    if (static_cast<int>(tail.size()) != u + 1) return false;
    if (std::abs(tail[0] - 1.0) > tol) return false;
    for (std::size_t r = 0; r + 1 < tail.size(); ++r)
      if (tail[r + 1] > tail[r] + tol) return false;
    for (double v : tail)
      if (!std::isfinite(v) || v < -tol || v > 1.0 + tol) return false;
  }
  return true;
}

void project_state(ConfigState& state) {
  for (auto& tail : state.tails) {
    if (tail.empty()) continue;
    tail[0] = 1.0;
    for (std::size_t r = 1; r < tail.size(); ++r) {
      double v = tail[r];
      if (!std::isfinite(v)) throw ProjectionFailure("non-finite occupancy tail");
      v = std::clamp(v, 0.0, 1.0);
      tail[r] = std::min(v, tail[r - 1]);
    }
  }
}

double aggregate_load(const ConfigTable& table, const SystemSpec& spec,
                      const ConfigState& state) {
  double y = 0.0;
  for (std::size_t e = 0; e < table.entries.size(); ++e) {
    const auto& entry = table.entries[e];
    const double alpha =
        spec.classes[static_cast<std::size_t>(entry.class_index)].fraction;
    double occupied = 0.0;
    for (std::size_t r = 1; r < state.tails[e].size(); ++r)
      occupied += state.tails[e][r];
    y += alpha * entry.weight * occupied;
  }
  return y;
}

double content_load(const ConfigTable& table, const SystemSpec& spec,
                    const ConfigState& state, int content) {
  double y = 0.0;
  for (std::size_t e = 0; e < table.entries.size(); ++e) {
    const auto& entry = table.entries[e];
    if (!std::binary_search(entry.contents.begin(), entry.contents.end(), content))
      continue;
    const double alpha =
        spec.classes[static_cast<std::size_t>(entry.class_index)].fraction;
    double occupied = 0.0;
    for (std::size_t r = 1; r < state.tails[e].size(); ++r)
      occupied += state.tails[e][r];
    y += alpha * entry.weight * occupied;
  }
  return y;
}

}  // namespace cdnsim
