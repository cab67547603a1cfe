// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <string>

#include "cdnsim/config.hpp"
#include "cdnsim/matching.hpp"
#include "cdnsim/model.hpp"

namespace cdnsim {

enum class PolicyKind { greedy, p2p, unif };

std::string to_string(PolicyKind policy);
PolicyKind policy_from_string(const std::string& name);

/// Fills every cache with a random content set whose probability is
/// proportional to the product of the normalized popularities of its
/// members. Servers draw from independent streams split off the seed, so a
/// seed pins the whole fleet.
Allocation sample_p2p(const SystemSpec& spec, std::uint64_t seed);

/// Fills every cache with a uniformly random content set of full size.
Allocation sample_unif(const SystemSpec& spec, std::uint64_t seed);

/// Deterministic caches from the greedy joint solve on the explicit fleet.
Allocation greedy_caches(const SystemSpec& spec);

/// Limiting per-content capacity under the greedy placement.
struct CapacityAllocation {
  std::vector<double> per_content;  // capacity share per content
  // Number of leading contents with positive share. Equals the catalog size
  // when the load is at most 1.
  int active = 0;
};

/// Per-content capacity the greedy placement dedicates in the large-fleet
/// limit. Below load 1 every content keeps its full per-server rate. Above
/// load 1 capacity goes to a prefix of the popularity order, chosen so the
/// leftover demand is equal across funded contents; this requires strictly
/// decreasing per-server rates.
CapacityAllocation greedy_capacity(std::span<const double> per_server_rates,
                                   double load);
CapacityAllocation greedy_capacity(const SystemSpec& spec);

struct ConfigOptions {
  // Enumerating one entry per content subset explodes combinatorially;
  // raise deliberately when a large table is really wanted.
  std::size_t max_entries = 1u << 16;
};

/// Limiting fraction of each class in each cache configuration.
/// p2p/unif: the sampling law itself, one entry per subset. greedy:
/// singleton supports with weights matching greedy_capacity, split across
/// classes in proportion to their bandwidth share, plus an empty-cache
/// entry when the fleet out-sizes the demand.
ConfigTable config_fractions(PolicyKind policy, const SystemSpec& spec,
                             const ConfigOptions& opts = {});

}  // namespace cdnsim
