// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "cdnsim/matching.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cdnsim/errors.hpp"
#include "maxflow.hpp"

namespace cdnsim {

namespace {

std::int64_t to_units(double x, double scale, bool exact, const char* what) {
  const double scaled = x * scale;
  const double rounded = std::nearbyint(scaled);
  if (exact && std::abs(scaled - rounded) > 1e-6)
    throw NonIntegralRates(std::string(what) +
                           " is not integral at the matching scale");
  return static_cast<std::int64_t>(rounded);
}

}  // namespace

MatchResult max_matching_value(const Allocation& alloc,
                               std::span<const double> rates,
                               std::span<const int> bandwidths,
                               const MatchOptions& opts) {
  const int n = static_cast<int>(bandwidths.size());
  const int m = static_cast<int>(rates.size());
  if (alloc.num_servers() != n)
    throw AllocationMismatch("allocation covers " +
                             std::to_string(alloc.num_servers()) +
                             " servers, fleet has " + std::to_string(n));

  // Nodes: 0 = source, 1..n = servers, n+1..n+m = contents, n+m+1 = sink.
  const int source = 0;
  const int sink = n + m + 1;
  detail::MaxFlow net(n + m + 2);

  std::int64_t server_total = 0;
  for (int s = 0; s < n; ++s) {
    const std::int64_t cap =
        to_units(bandwidths[static_cast<std::size_t>(s)], opts.scale,
                 opts.exact, "bandwidth");
    server_total += cap;
    net.add_edge(source, 1 + s, cap);
  }
  for (int c = 0; c < m; ++c)
    net.add_edge(1 + n + c,
                 sink,
                 to_units(rates[static_cast<std::size_t>(c)], opts.scale,
                          opts.exact, "rate"));

  struct MiddleEdge {
    int server;
    int content;
    int edge_id;
  };
  std::vector<MiddleEdge> middle;
  for (int s = 0; s < n; ++s) {
    for (int c : alloc.stored[static_cast<std::size_t>(s)]) {
      if (c < 0 || c >= m)
        throw AllocationMismatch("allocation stores unknown content " +
                                 std::to_string(c + 1));
      middle.push_back({s, c, net.add_edge(1 + s, 1 + n + c, server_total)});
    }
  }

  const std::int64_t total = net.run(source, sink);

  MatchResult result;
  result.value = static_cast<double>(total) / opts.scale;
  for (const auto& e : middle) {
    const std::int64_t f = net.flow_on(e.edge_id);
    if (f > 0)
      result.flow.entries.push_back(
          {e.server, e.content, static_cast<double>(f) / opts.scale});
  }
  std::sort(result.flow.entries.begin(), result.flow.entries.end(),
            [](const FlowEntry& a, const FlowEntry& b) {
              return std::tie(a.server, a.content) < std::tie(b.server, b.content);
            });
  result.flow.value = result.value;
  return result;
}

GreedyResult greedy_solve(std::span<const int> bandwidths,
                          std::span<const double> rates,
                          std::span<const int> cache_sizes) {
  const int n = static_cast<int>(bandwidths.size());
  const int m = static_cast<int>(rates.size());

  std::vector<double> server_flow(bandwidths.begin(), bandwidths.end());
  std::vector<int> degree(cache_sizes.begin(), cache_sizes.end());
  std::vector<double> content_flow(rates.begin(), rates.end());

  GreedyResult result;
  result.alloc.stored.assign(static_cast<std::size_t>(n), {});

  for (;;) {
    // Fattest remaining server among those with cache slots left; lowest
    // index wins ties.
    int best_s = -1;
    for (int s = 0; s < n; ++s) {
      if (degree[static_cast<std::size_t>(s)] <= 0) continue;
      if (best_s < 0 || server_flow[static_cast<std::size_t>(s)] >
                            server_flow[static_cast<std::size_t>(best_s)])
        best_s = s;
    }
    if (best_s < 0 || server_flow[static_cast<std::size_t>(best_s)] <= 0.0)
      break;

    int best_c = -1;
    for (int c = 0; c < m; ++c) {
      if (best_c < 0 || content_flow[static_cast<std::size_t>(c)] >
                            content_flow[static_cast<std::size_t>(best_c)])
        best_c = c;
    }
    if (best_c < 0 || content_flow[static_cast<std::size_t>(best_c)] <= 0.0)
      break;

    const double matched = std::min(server_flow[static_cast<std::size_t>(best_s)],
                                    content_flow[static_cast<std::size_t>(best_c)]);
    server_flow[static_cast<std::size_t>(best_s)] -= matched;
    content_flow[static_cast<std::size_t>(best_c)] -= matched;
    --degree[static_cast<std::size_t>(best_s)];

    result.alloc.stored[static_cast<std::size_t>(best_s)].push_back(best_c);
    result.flow.entries.push_back({best_s, best_c, matched});
    result.trace.push_back({best_s, best_c, matched});
    result.value += matched;
  }

  for (auto& contents : result.alloc.stored)
    std::sort(contents.begin(), contents.end());
  std::sort(result.flow.entries.begin(), result.flow.entries.end(),
            [](const FlowEntry& a, const FlowEntry& b) {
              return std::tie(a.server, a.content) < std::tie(b.server, b.content);
            });
  result.flow.value = result.value;
  return result;
}

GreedyResult greedy_solve(const SystemSpec& spec) {
  const auto fleet = spec.explicit_fleet();
  std::vector<int> bandwidths, cache_sizes;
  bandwidths.reserve(fleet.size());
  cache_sizes.reserve(fleet.size());
  for (const auto& server : fleet) {
    bandwidths.push_back(server.bandwidth);
    cache_sizes.push_back(server.cache_size);
  }
  return greedy_solve(bandwidths, spec.catalog.rates, cache_sizes);
}

namespace {

// Advances `subset` (ascending indices into [0, m)) to the next
// lexicographic combination of the same size. Returns false after the last.
bool next_combination(std::vector<int>& subset, int m) {
  const int k = static_cast<int>(subset.size());
  for (int i = k - 1; i >= 0; --i) {
    if (subset[static_cast<std::size_t>(i)] < m - (k - i)) {
      ++subset[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j)
        subset[static_cast<std::size_t>(j)] =
            subset[static_cast<std::size_t>(j - 1)] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

ExactResult exact_solve(std::span<const int> bandwidths,
                        std::span<const double> rates,
                        std::span<const int> cache_sizes,
                        const ExactLimits& limits) {
  const int n = static_cast<int>(bandwidths.size());
  if (n > limits.max_servers)
    throw InstanceTooLarge("exact solver limited to " +
                           std::to_string(limits.max_servers) + " servers");

  // Contents with zero rate cannot carry flow; drop them and remap.
  std::vector<int> live;
  std::vector<double> live_rates;
  for (int c = 0; c < static_cast<int>(rates.size()); ++c) {
    if (rates[static_cast<std::size_t>(c)] > 0.0) {
      live.push_back(c);
      live_rates.push_back(rates[static_cast<std::size_t>(c)]);
    }
  }
  const int m = static_cast<int>(live.size());
  if (m > limits.max_contents)
    throw InstanceTooLarge("exact solver limited to " +
                           std::to_string(limits.max_contents) + " contents");

  ExactResult best;
  best.alloc.stored.assign(static_cast<std::size_t>(n), {});
  if (m == 0) return best;

  // One combination cursor per server over supports of exactly
  // min(cache, m) contents; adding contents to a support never lowers the
  // matching value, so maximal supports suffice.
  std::vector<std::vector<int>> cursor(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    const int k = std::min(cache_sizes[static_cast<std::size_t>(s)], m);
    cursor[static_cast<std::size_t>(s)].resize(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) cursor[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)] = j;
  }

  Allocation candidate;
  candidate.stored.assign(static_cast<std::size_t>(n), {});
  for (;;) {
    for (int s = 0; s < n; ++s)
      candidate.stored[static_cast<std::size_t>(s)] = cursor[static_cast<std::size_t>(s)];
    const MatchResult match = max_matching_value(candidate, live_rates, bandwidths);
    if (match.value > best.value) {
      best.value = match.value;
      best.alloc = candidate;
    }

    int s = n - 1;
    while (s >= 0 && !next_combination(cursor[static_cast<std::size_t>(s)], m)) {
      const int k = static_cast<int>(cursor[static_cast<std::size_t>(s)].size());
      for (int j = 0; j < k; ++j)
        cursor[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)] = j;
      --s;
    }
    if (s < 0) break;
  }

  // Map support indices back to original content ids.
  for (auto& contents : best.alloc.stored)
    for (int& c : contents) c = live[static_cast<std::size_t>(c)];
  return best;
}

ExactResult exact_solve(const SystemSpec& spec, const ExactLimits& limits) {
  const auto fleet = spec.explicit_fleet();
  std::vector<int> bandwidths, cache_sizes;
  for (const auto& server : fleet) {
    bandwidths.push_back(server.bandwidth);
    cache_sizes.push_back(server.cache_size);
  }
  return exact_solve(bandwidths, spec.catalog.rates, cache_sizes, limits);
}

Allocation allocation_from_flow(const FlowAssignment& flow,
                                std::span<const int> cache_sizes) {
  Allocation alloc;
  alloc.stored.assign(cache_sizes.size(), {});
  for (const auto& entry : flow.entries) {
    if (entry.server < 0 || entry.server >= static_cast<int>(cache_sizes.size()))
      throw AllocationMismatch("flow references unknown server " +
                               std::to_string(entry.server + 1));
    if (entry.flow > 0.0)
      alloc.stored[static_cast<std::size_t>(entry.server)].push_back(entry.content);
  }
  for (std::size_t s = 0; s < alloc.stored.size(); ++s) {
    auto& contents = alloc.stored[s];
    std::sort(contents.begin(), contents.end());
    contents.erase(std::unique(contents.begin(), contents.end()), contents.end());
    if (static_cast<int>(contents.size()) > cache_sizes[s])
      throw SupportTooLarge("server " + std::to_string(s + 1) + " carries " +
                            std::to_string(contents.size()) +
                            " contents, cache holds " +
                            std::to_string(cache_sizes[s]));
  }
  return alloc;
}

SystemSpec three_partition_instance(std::span<const double> sizes,
                                    double target) {
  if (sizes.empty() || sizes.size() % 3 != 0)
    throw BadSizes("element count must be a positive multiple of 3");
  const long groups = static_cast<long>(sizes.size()) / 3;
  double sum = 0.0;
  for (double v : sizes) {
    if (!(v > 0.0)) throw BadSizes("element sizes must be positive");
    sum += v;
  }
  if (std::abs(sum - static_cast<double>(groups) * target) > 1e-9)
    throw BadSizes("sizes sum to " + std::to_string(sum) + ", expected " +
                   std::to_string(static_cast<double>(groups) * target));

  ServerClass cls;
  cls.bandwidth = static_cast<int>(std::llround(target));
  if (std::abs(target - cls.bandwidth) > 1e-9)
    throw BadSizes("group target must be integral to form server bandwidths");
  cls.cache_size = 3;
  cls.count = groups;
  return make_spec(groups, {cls}, {sizes.begin(), sizes.end()},
                   FleetMode::counts);
}

}  // namespace cdnsim
