// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <span>
#include <vector>

#include "cdnsim/model.hpp"

namespace cdnsim {

/// Cache contents per server. stored[s] is the sorted list of content
/// indices (0-based) held by server s; its size never exceeds the server's
/// cache size.
struct Allocation {
  std::vector<std::vector<int>> stored;

  int num_servers() const { return static_cast<int>(stored.size()); }
  bool operator==(const Allocation&) const = default;
};

struct FlowEntry {
  int server = 0;
  int content = 0;
  double flow = 0.0;

  bool operator==(const FlowEntry&) const = default;
};

/// A feasible (server, content) flow: row sums bounded by bandwidth, column
/// sums by content rate, per-server support by cache size.
struct FlowAssignment {
  std::vector<FlowEntry> entries;  // sorted by (server, content), flows > 0
  double value = 0.0;

  bool operator==(const FlowAssignment&) const = default;
};

struct GreedyStep {
  int server = 0;
  int content = 0;
  double flow = 0.0;

  bool operator==(const GreedyStep&) const = default;
};

struct GreedyResult {
  Allocation alloc;
  FlowAssignment flow;
  std::vector<GreedyStep> trace;
  double value = 0.0;
};

struct MatchOptions {
  // Rates and bandwidths are scaled by this factor and rounded to integers,
  // so the matching value is exact at 1/scale resolution.
  double scale = 1e6;
  // When set, inputs must already be integral at the scale; otherwise the
  // call fails instead of rounding.
  bool exact = false;
};

struct MatchResult {
  double value = 0.0;
  FlowAssignment flow;
};

/// Maximum total request flow servable under a fixed allocation: a max-flow
/// over source -> servers (bandwidth caps) -> stored contents -> sink (rate
/// caps).
MatchResult max_matching_value(const Allocation& alloc,
                               std::span<const double> rates,
                               std::span<const int> bandwidths,
                               const MatchOptions& opts = {});

/// Greedy joint placement/matching: repeatedly match the fattest remaining
/// server flow with the fattest remaining content flow. Ties break to the
/// lowest server index, then the lowest content index, so traces are
/// reproducible. Guaranteed within a factor 2 of the exact optimum.
GreedyResult greedy_solve(std::span<const int> bandwidths,
                          std::span<const double> rates,
                          std::span<const int> cache_sizes);
GreedyResult greedy_solve(const SystemSpec& spec);

struct ExactLimits {
  int max_servers = 4;
  int max_contents = 4;
};

struct ExactResult {
  double value = 0.0;
  Allocation alloc;
};

/// Exact optimum by exhausting cache support patterns and evaluating each
/// with max_matching_value. Guarded because the pattern count is
/// exponential; intended as a test oracle on tiny instances.
ExactResult exact_solve(std::span<const int> bandwidths,
                        std::span<const double> rates,
                        std::span<const int> cache_sizes,
                        const ExactLimits& limits = {});
ExactResult exact_solve(const SystemSpec& spec, const ExactLimits& limits = {});

/// Indicator extraction: server s stores content c iff it carries strictly
/// positive flow. Fails if some server's support exceeds its cache size.
Allocation allocation_from_flow(const FlowAssignment& flow,
                                std::span<const int> cache_sizes);

/// Instance whose exact matching value reaches num_groups * target exactly
/// when the sizes admit a 3-partition: one content per element, and
/// |sizes|/3 servers with three cache slots and bandwidth target each.
SystemSpec three_partition_instance(std::span<const double> sizes,
                                    double target);

}  // namespace cdnsim
