// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "cdnsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cdnsim/errors.hpp"

namespace cdnsim {

double Catalog::total() const {
  return std::accumulate(rates.begin(), rates.end(), 0.0);
}

double SystemSpec::mean_bandwidth() const {
  double mean = 0.0;
  for (const auto& cls : classes) mean += cls.fraction * cls.bandwidth;
  return mean;
}

std::vector<Server> SystemSpec::explicit_fleet() const {
  std::vector<Server> fleet;
  fleet.reserve(static_cast<std::size_t>(n));
  for (int ci = 0; ci < static_cast<int>(classes.size()); ++ci) {
    const auto& cls = classes[ci];
    for (long k = 0; k < cls.count; ++k)
      fleet.push_back({cls.bandwidth, cls.cache_size, ci});
  }
  return fleet;
}

std::vector<double> zipf_rates(int m, double eta) {
  if (m < 1) throw InfeasibleSpec("zipf catalog needs at least one content");
  if (eta < 0.0) throw InfeasibleSpec("zipf decay must be nonnegative");
  std::vector<double> weights(static_cast<std::size_t>(m));
  for (int c = 0; c < m; ++c)
    weights[static_cast<std::size_t>(c)] = std::pow(c + 1.0, -eta);
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= sum;
  return weights;
}

double system_load(const SystemSpec& spec) {
  return spec.catalog.total() /
         (static_cast<double>(spec.n) * spec.mean_bandwidth());
}

namespace {

// Rounds n * fraction to integer counts that sum to n: floor first, then
// hand out the remainder by descending fractional part (ties to the lower
// class index).
void resolve_counts(long n, std::vector<ServerClass>& classes) {
  const std::size_t k = classes.size();
  std::vector<double> exact(k);
  std::vector<long> counts(k);
  long assigned = 0;
  for (std::size_t i = 0; i < k; ++i) {
    exact[i] = static_cast<double>(n) * classes[i].fraction;
    counts[i] = static_cast<long>(std::floor(exact[i] + 1e-12));
    assigned += counts[i];
  }
  long leftover = n - assigned;
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return exact[a] - std::floor(exact[a]) > exact[b] - std::floor(exact[b]);
  });
  for (std::size_t j = 0; leftover > 0 && j < k; ++j, --leftover)
    ++counts[order[j]];
  if (leftover != 0) throw InfeasibleSpec("class fractions could not be rounded to n servers");
  for (std::size_t i = 0; i < k; ++i) classes[i].count = counts[i];
}

}  // namespace

SystemSpec make_spec(long n, std::vector<ServerClass> classes,
                     std::vector<double> rates, FleetMode mode) {
  if (classes.empty()) throw InfeasibleSpec("no server classes");
  for (const auto& cls : classes) {
    if (cls.bandwidth < 1) throw InfeasibleSpec("class bandwidth must be >= 1");
    if (cls.cache_size < 1) throw InfeasibleSpec("class cache size must be >= 1");
  }
  if (rates.empty()) throw InfeasibleSpec("empty catalog");
  for (double r : rates) {
    if (!(r > 0.0) || !std::isfinite(r))
      throw InfeasibleSpec("content rates must be positive and finite");
  }

  if (mode == FleetMode::fractions) {
    if (n < 1) throw InfeasibleSpec("fraction mode needs a positive server count");
    double total_fraction = 0.0;
    for (const auto& cls : classes) {
      if (cls.fraction < 0.0 || cls.fraction > 1.0)
        throw InfeasibleSpec("class fraction outside [0, 1]");
      total_fraction += cls.fraction;
    }
    if (std::abs(total_fraction - 1.0) > 1e-9)
      throw InfeasibleSpec("class fractions sum to " + std::to_string(total_fraction) +
                           ", expected 1");
    resolve_counts(n, classes);
  } else {
    long total = 0;
    for (const auto& cls : classes) {
      if (cls.count < 0) throw InfeasibleSpec("negative class count");
      total += cls.count;
    }
    if (total < 1) throw InfeasibleSpec("explicit fleet is empty");
    if (n == 0) n = total;
    if (total != n)
      throw InfeasibleSpec("class counts sum to " + std::to_string(total) +
                           ", expected n = " + std::to_string(n));
    for (auto& cls : classes)
      cls.fraction = static_cast<double>(cls.count) / static_cast<double>(n);
  }

  SystemSpec spec;
  spec.n = n;
  spec.mode = mode;
  spec.classes = std::move(classes);
  spec.catalog.rates = std::move(rates);

  const double total_rate = spec.catalog.total();
  spec.catalog.normalized.resize(spec.catalog.rates.size());
  for (std::size_t c = 0; c < spec.catalog.rates.size(); ++c)
    spec.catalog.normalized[c] = spec.catalog.rates[c] / total_rate;

  spec.per_server_rates.resize(spec.catalog.rates.size());
  for (std::size_t c = 0; c < spec.catalog.rates.size(); ++c)
    spec.per_server_rates[c] = spec.catalog.rates[c] / static_cast<double>(n);
  spec.per_server_total = total_rate / static_cast<double>(n);

  spec.load = system_load(spec);
  if (!std::isfinite(spec.load) || !(spec.load > 0.0))
    throw InfeasibleSpec("system load is not positive and finite");
  return spec;
}

SystemSpec make_zipf_spec(long n, std::vector<ServerClass> classes, int m,
                          double eta, double rho, FleetMode mode) {
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw InfeasibleSpec("target load must be positive and finite");
  auto shape = zipf_rates(m, eta);

  // Resolve counts/fractions on a probe so the target uses the final
  // population-weighted bandwidth.
  SystemSpec probe = make_spec(n, std::move(classes), {1.0}, mode);
  const double target_total =
      rho * static_cast<double>(probe.n) * probe.mean_bandwidth();

  std::vector<double> rates(shape.size());
  double running = 0.0;
  for (std::size_t c = 0; c < shape.size(); ++c) {
    rates[c] = shape[c] * target_total;
    running += rates[c];
  }
  // Fold the accumulated rounding of the sum into the head content so the
  // realized load hits rho to the last bit of the division.
  rates[0] += target_total - running;
  return make_spec(probe.n, probe.classes, std::move(rates), probe.mode);
}

SystemSpec make_sweep_spec(long n, int m, double eta, double rho, int d,
                           int u) {
  ServerClass cls;
  cls.bandwidth = u;
  cls.cache_size = d;
  cls.fraction = 1.0;
  return make_zipf_spec(n, {cls}, m, eta, rho);
}

}  // namespace cdnsim
