// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

// Independent oracles used by tests only. These deliberately avoid the
// library's code paths: blocking comes from the classic recursion, subset
// laws from direct enumeration, and fits from a plain least squares.

#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace oracles {

/// Erlang loss probability for `servers` lines offered `erlangs` of load.
inline double erlang_b(int servers, double erlangs) {
  double b = 1.0;
  for (int k = 1; k <= servers; ++k)
    b = erlangs * b / (static_cast<double>(k) + erlangs * b);
  return b;
}

/// 99th-percentile chi-square quantile via the Wilson-Hilferty cube
/// approximation; plenty accurate for the goodness-of-fit gates here.
inline double chi_square_crit_99(int dof) {
  const double z = 2.3263478740408408;  // 99th percentile of the normal
  const double d = static_cast<double>(dof);
  const double t = 1.0 - 2.0 / (9.0 * d) + z * std::sqrt(2.0 / (9.0 * d));
  return d * t * t * t;
}

/// Pearson statistic of observed counts against expected probabilities.
inline double chi_square_stat(const std::vector<long long>& observed,
                              const std::vector<double>& expected_prob) {
  long long total = 0;
  for (long long o : observed) total += o;
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expect = expected_prob[i] * static_cast<double>(total);
    const double diff = static_cast<double>(observed[i]) - expect;
    stat += diff * diff / expect;
  }
  return stat;
}

/// All size-d subsets of {0..m-1} with probability proportional to the
/// product of their members' weights.
inline std::vector<std::pair<std::vector<int>, double>> product_subset_law(
    const std::vector<double>& weights, int d) {
  const int m = static_cast<int>(weights.size());
  std::vector<std::pair<std::vector<int>, double>> law;
  std::vector<int> subset(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) subset[static_cast<std::size_t>(i)] = i;
  double norm = 0.0;
  for (;;) {
    double w = 1.0;
    for (int c : subset) w *= weights[static_cast<std::size_t>(c)];
    law.emplace_back(subset, w);
    norm += w;
    int i = d - 1;
    while (i >= 0 && subset[static_cast<std::size_t>(i)] == m - (d - i)) --i;
    if (i < 0) break;
    ++subset[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < d; ++j)
      subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j) - 1] + 1;
  }
  for (auto& [k, w] : law) w /= norm;
  return law;
}

/// Least-squares slope of y against x.
inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return num / den;
}

}  // namespace oracles
