// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <vector>

namespace cdnsim {

enum class FleetMode {
  fractions,  // classes carry population shares, n given separately
  counts,     // classes carry explicit server counts
};

struct ServerClass {
  int bandwidth = 1;   // simultaneous requests one server can carry
  int cache_size = 1;  // content slots per server
  // Both views are resolved at construction: in fraction mode counts come
  // from largest-remainder rounding of n*fraction; in count mode fractions
  // are count/n.
  double fraction = 0.0;
  long count = 0;
};

struct Catalog {
  std::vector<double> rates;       // absolute arrival rate per content
  std::vector<double> normalized;  // rates / sum(rates)

  int size() const { return static_cast<int>(rates.size()); }
  double total() const;
};

/// One concrete server of an explicit fleet.
struct Server {
  int bandwidth = 1;
  int cache_size = 1;
  int class_index = 0;
};

struct SystemSpec {
  long n = 0;
  FleetMode mode = FleetMode::fractions;
  std::vector<ServerClass> classes;
  Catalog catalog;

  std::vector<double> per_server_rates;  // rates / n
  double per_server_total = 0.0;         // sum of per_server_rates
  double load = 0.0;                     // offered rate over fleet bandwidth

  int num_contents() const { return catalog.size(); }
  /// Population-weighted bandwidth per server.
  double mean_bandwidth() const;
  /// Materializes the fleet, class by class, in class order.
  std::vector<Server> explicit_fleet() const;

  bool operator==(const SystemSpec&) const = default;
};

inline bool operator==(const ServerClass& a, const ServerClass& b) {
  return a.bandwidth == b.bandwidth && a.cache_size == b.cache_size &&
         a.fraction == b.fraction && a.count == b.count;
}
inline bool operator==(const Catalog& a, const Catalog& b) {
  return a.rates == b.rates && a.normalized == b.normalized;
}

/// Normalized popularity vector lambda_hat_c proportional to c^-eta,
/// c = 1..m. Strictly decreasing for eta > 0, uniform for eta = 0.
std::vector<double> zipf_rates(int m, double eta);

/// Offered load: total arrival rate over total fleet bandwidth.
double system_load(const SystemSpec& spec);

/// Validates the parts and fills every derived field.
/// In count mode, n may be 0, in which case it is derived from the counts.
SystemSpec make_spec(long n, std::vector<ServerClass> classes,
                     std::vector<double> rates, FleetMode mode);

/// Spec with a zipf(m, eta) catalog scaled so that system_load(spec) equals
/// rho up to rounding of the final sum.
SystemSpec make_zipf_spec(long n, std::vector<ServerClass> classes, int m,
                          double eta, double rho,
                          FleetMode mode = FleetMode::fractions);

/// Single-class convenience used by sweeps: n servers of (bandwidth u,
/// cache d), zipf(m, eta) catalog at load rho.
SystemSpec make_sweep_spec(long n, int m, double eta, double rho, int d,
                           int u);

}  // namespace cdnsim
