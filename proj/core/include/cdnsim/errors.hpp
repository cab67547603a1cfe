// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace cdnsim {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Instance document is structurally broken (missing field, wrong type,
// inconsistent fleet mode).
struct MalformedConfig : Error {
  using Error::Error;
};

// Instance parses but violates a model invariant (fractions do not sum to
// one, nonpositive rate, counts inconsistent with n).
struct InfeasibleSpec : Error {
  using Error::Error;
};

// Exact matching was requested but rates/capacities are not integral at the
// configured scale.
struct NonIntegralRates : Error {
  using Error::Error;
};

// Instance exceeds the enumeration guard of the exact solver.
struct InstanceTooLarge : Error {
  using Error::Error;
};

// A flow assignment touches more contents on a server than its cache holds.
struct SupportTooLarge : Error {
  using Error::Error;
};

// 3-partition element sizes do not sum to n times the target.
struct BadSizes : Error {
  using Error::Error;
};

// A cache size exceeds the catalog size, so no full subset can be sampled.
struct CacheTooLarge : Error {
  using Error::Error;
};

// Popularities are tied where a strict ordering is required.
struct TiedPopularities : Error {
  using Error::Error;
};

// Allocation references servers or contents that the instance lacks.
struct AllocationMismatch : Error {
  using Error::Error;
};

// A per-content arrival denominator vanished in a state that still has
// unsaturated configurations; only reachable from a corrupted state.
struct DegenerateDenominator : Error {
  using Error::Error;
};

// Projection failed to restore the occupancy invariants (NaN/Inf state).
struct ProjectionFailure : Error {
  using Error::Error;
};

// Closed-form trajectory asked to start above its capacity cap.
struct BadInitialValue : Error {
  using Error::Error;
};

// Stationary prediction requested for a policy/cache-size combination with
// no fluid characterization.
struct UnsupportedRegime : Error {
  using Error::Error;
};

// Configuration enumeration would exceed the memory guard.
struct ConfigSpaceTooLarge : Error {
  using Error::Error;
};

struct IoFailure : Error {
  using Error::Error;
};

}  // namespace cdnsim
