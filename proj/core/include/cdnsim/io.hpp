// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <string>

#include "cdnsim/matching.hpp"
#include "cdnsim/model.hpp"

namespace cdnsim {

// Instance documents look like
//   {"n": 400,
//    "classes": [{"bandwidth": 1, "cache_size": 2, "fraction": 1.0}],
//    "catalog": {"rates": [2.0, 1.0]}}
// Classes carry either "fraction" on every entry or "count" on every entry.
// The catalog alternatively takes
//   {"generator": {"m": 500, "eta": 2.0, "rho": 0.8}}
// (or "total_rate" instead of "rho") to derive a zipf catalog; with "rho"
// the rates are scaled so the realized load equals it.
SystemSpec parse_spec(const std::string& json_text);
SystemSpec load_spec(const std::string& path);
std::string spec_to_json(const SystemSpec& spec);

// Allocations serialize as {"1": [1, 3], "2": [2]} with 1-based server and
// content ids.
std::string allocation_to_json(const Allocation& alloc);
Allocation parse_allocation(const std::string& json_text);
Allocation load_allocation(const std::string& path);

// {"value": v, "allocation": {...}, "trace": [[server, content, flow]...]}
// with 1-based ids.
std::string solve_result_to_json(double value, const Allocation& alloc,
                                 const std::vector<GreedyStep>& trace);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace cdnsim
