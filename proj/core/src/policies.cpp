// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "cdnsim/policies.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "cdnsim/errors.hpp"
#include "cdnsim/rng.hpp"

namespace cdnsim {

std::string to_string(PolicyKind policy) {
  switch (policy) {
    case PolicyKind::greedy: return "greedy";
    case PolicyKind::p2p: return "p2p";
    case PolicyKind::unif: return "unif";
  }
  return "?";
}

PolicyKind policy_from_string(const std::string& name) {
  if (name == "greedy") return PolicyKind::greedy;
  if (name == "p2p") return PolicyKind::p2p;
  if (name == "unif") return PolicyKind::unif;
  throw MalformedConfig("unknown placement policy '" + name + "'");
}

namespace {

// Sequential conditional sampler for product-weighted subsets of fixed
// size. Walking contents in order, the chance of including content i given
// r slots left is
//     w_i * e_{r-1}(w_{i+1..}) / e_r(w_{i..}),
// a ratio of elementary symmetric polynomials. The suffix table costs
// O(m*d) once per cache size and each draw costs O(m). Rows carry a log
// scale factor so long catalogs can neither overflow nor flush to zero.
class SubsetSampler {
 public:
  SubsetSampler(const std::vector<double>& weights, int subset_size)
      : m_(static_cast<int>(weights.size())), d_(subset_size), weights_(weights) {
    // Scaling all weights rescales e_k by scale^k, which cancels in the
    // inclusion ratio; normalizing by the max keeps products tame.
    const double wmax = *std::max_element(weights_.begin(), weights_.end());
    for (double& w : weights_) w /= wmax;

    rows_.assign(static_cast<std::size_t>(m_) + 1,
                 std::vector<double>(static_cast<std::size_t>(d_) + 1, 0.0));
    logscale_.assign(static_cast<std::size_t>(m_) + 1, 0.0);
    rows_[static_cast<std::size_t>(m_)][0] = 1.0;
    for (int i = m_ - 1; i >= 0; --i) {
      const auto& prev = rows_[static_cast<std::size_t>(i) + 1];
      auto& row = rows_[static_cast<std::size_t>(i)];
      const double w = weights_[static_cast<std::size_t>(i)];
      row[0] = prev[0];
      for (int k = 1; k <= d_; ++k)
        row[static_cast<std::size_t>(k)] =
            prev[static_cast<std::size_t>(k)] + w * prev[static_cast<std::size_t>(k) - 1];
      logscale_[static_cast<std::size_t>(i)] = logscale_[static_cast<std::size_t>(i) + 1];
      const double rowmax = *std::max_element(row.begin(), row.end());
      if (rowmax > 1e250 || (rowmax > 0.0 && rowmax < 1e-250)) {
        for (double& v : row) v /= rowmax;
        logscale_[static_cast<std::size_t>(i)] += std::log(rowmax);
      }
    }
  }

  std::vector<int> draw(Rng& rng) const {
    std::vector<int> subset;
    subset.reserve(static_cast<std::size_t>(d_));
    int remaining = d_;
    for (int i = 0; i < m_ && remaining > 0; ++i) {
      double p;
      if (m_ - i == remaining) {
        p = 1.0;  // forced: exactly enough contents left
      } else {
        const std::size_t si = static_cast<std::size_t>(i);
        const double num = weights_[si] * rows_[si + 1][static_cast<std::size_t>(remaining) - 1] *
                           std::exp(logscale_[si + 1] - logscale_[si]);
        p = std::clamp(num / rows_[si][static_cast<std::size_t>(remaining)], 0.0, 1.0);
      }
      if (rng.uniform01() < p) {
        subset.push_back(i);
        --remaining;
      }
    }
    return subset;
  }

 private:
  int m_;
  int d_;
  std::vector<double> weights_;
  std::vector<std::vector<double>> rows_;
  std::vector<double> logscale_;
};

void check_cache_sizes(const SystemSpec& spec) {
  for (const auto& cls : spec.classes) {
    if (cls.cache_size > spec.num_contents())
      throw CacheTooLarge("cache size " + std::to_string(cls.cache_size) +
                          " exceeds catalog of " +
                          std::to_string(spec.num_contents()));
  }
}

}  // namespace

Allocation sample_p2p(const SystemSpec& spec, std::uint64_t seed) {
  check_cache_sizes(spec);
  std::map<int, SubsetSampler> samplers;
  for (const auto& cls : spec.classes)
    samplers.try_emplace(cls.cache_size, spec.catalog.normalized, cls.cache_size);

  const Rng root(seed);
  const auto fleet = spec.explicit_fleet();
  Allocation alloc;
  alloc.stored.reserve(fleet.size());
  for (std::size_t s = 0; s < fleet.size(); ++s) {
    Rng stream = root.split(s);
    alloc.stored.push_back(samplers.at(fleet[s].cache_size).draw(stream));
  }
  return alloc;
}

Allocation sample_unif(const SystemSpec& spec, std::uint64_t seed) {
  check_cache_sizes(spec);
  const int m = spec.num_contents();
  const Rng root(seed);
  const auto fleet = spec.explicit_fleet();
  Allocation alloc;
  alloc.stored.reserve(fleet.size());
  for (std::size_t s = 0; s < fleet.size(); ++s) {
    Rng stream = root.split(s);
    std::vector<int> subset;
    int remaining = fleet[s].cache_size;
    subset.reserve(static_cast<std::size_t>(remaining));
    // Selection sampling: include i with probability slots/(items left).
    for (int i = 0; i < m && remaining > 0; ++i) {
      const double p = static_cast<double>(remaining) / static_cast<double>(m - i);
      if (stream.uniform01() < p) {
        subset.push_back(i);
        --remaining;
      }
    }
    alloc.stored.push_back(std::move(subset));
  }
  return alloc;
}

Allocation greedy_caches(const SystemSpec& spec) {
  return greedy_solve(spec).alloc;
}

CapacityAllocation greedy_capacity(std::span<const double> per_server_rates,
                                   double load) {
  const auto& lam = per_server_rates;
  const int m = static_cast<int>(lam.size());
  CapacityAllocation cap;

  if (load <= 1.0) {
    cap.per_content.assign(lam.begin(), lam.end());
    cap.active = m;
    return cap;
  }

  for (int c = 0; c + 1 < m; ++c) {
    if (lam[static_cast<std::size_t>(c)] - lam[static_cast<std::size_t>(c) + 1] <=
        1e-12 * lam[static_cast<std::size_t>(c)])
      throw TiedPopularities("contents " + std::to_string(c + 1) + " and " +
                             std::to_string(c + 2) +
                             " are tied; overloaded greedy capacity needs a "
                             "strict popularity order");
  }

  double total = 0.0;
  for (double v : lam) total += v;
  const double target = total / load;
  std::vector<double> prefix(static_cast<std::size_t>(m) + 1, 0.0);
  for (int c = 0; c < m; ++c)
    prefix[static_cast<std::size_t>(c) + 1] =
        prefix[static_cast<std::size_t>(c)] + lam[static_cast<std::size_t>(c)];

  // The k-th interval is (prefix(k-1) - (k-1)*lam_k, prefix(k) - k*lam_{k+1}];
  // consecutive intervals share endpoints, so exactly one contains target.
  int k = 0;
  for (int cand = 1; cand <= m; ++cand) {
    const double lo = prefix[static_cast<std::size_t>(cand) - 1] -
                      (cand - 1) * lam[static_cast<std::size_t>(cand) - 1];
    const double hi = prefix[static_cast<std::size_t>(cand)] -
                      cand * (cand < m ? lam[static_cast<std::size_t>(cand)] : 0.0);
    if (target > lo && target <= hi) {
      k = cand;
      break;
    }
  }
  if (k == 0)
    throw InfeasibleSpec("no capacity cutoff found; load exceeds total demand?");

  const double residual = (prefix[static_cast<std::size_t>(k)] - target) / k;
  cap.per_content.assign(static_cast<std::size_t>(m), 0.0);
  for (int c = 0; c < k; ++c)
    cap.per_content[static_cast<std::size_t>(c)] =
        lam[static_cast<std::size_t>(c)] - residual;
  cap.active = k;
  return cap;
}

CapacityAllocation greedy_capacity(const SystemSpec& spec) {
  return greedy_capacity(spec.per_server_rates, spec.load);
}

namespace {

double binomial_count(int m, int d) {
  double result = 1.0;
  for (int i = 1; i <= d; ++i)
    result *= static_cast<double>(m - d + i) / static_cast<double>(i);
  return result;
}

void append_subset_entries(ConfigTable& table, const SystemSpec& spec,
                           int class_index, bool product_weighted,
                           const ConfigOptions& opts) {
  const int m = spec.num_contents();
  const int d = spec.classes[static_cast<std::size_t>(class_index)].cache_size;
  if (d > m)
    throw CacheTooLarge("cache size " + std::to_string(d) +
                        " exceeds catalog of " + std::to_string(m));
  const double count = binomial_count(m, d);
  if (count + static_cast<double>(table.entries.size()) >
      static_cast<double>(opts.max_entries))
    throw ConfigSpaceTooLarge(
        "configuration table needs about " + std::to_string(count) +
        " entries per class; raise the entry guard to materialize it");

  const auto& popularity = spec.catalog.normalized;
  const double wmax = *std::max_element(popularity.begin(), popularity.end());

  std::vector<int> subset(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) subset[static_cast<std::size_t>(j)] = j;

  std::vector<std::pair<std::vector<int>, double>> rows;
  double norm = 0.0;
  for (;;) {
    double w = 1.0;
    if (product_weighted)
      for (int c : subset) w *= popularity[static_cast<std::size_t>(c)] / wmax;
    rows.emplace_back(subset, w);
    norm += w;

    int i = d - 1;
    while (i >= 0 && subset[static_cast<std::size_t>(i)] == m - (d - i)) --i;
    if (i < 0) break;
    ++subset[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < d; ++j)
      subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j) - 1] + 1;
  }

  for (auto& [contents, w] : rows)
    table.entries.push_back({class_index, std::move(contents), w / norm});
}

}  // namespace

ConfigTable config_fractions(PolicyKind policy, const SystemSpec& spec,
                             const ConfigOptions& opts) {
  ConfigTable table;
  if (policy == PolicyKind::p2p || policy == PolicyKind::unif) {
    for (int ci = 0; ci < static_cast<int>(spec.classes.size()); ++ci)
      append_subset_entries(table, spec, ci, policy == PolicyKind::p2p, opts);
    return table;
  }

  // Greedy fills caches with single contents in the limit. Capacity shares
  // pin only the bandwidth-weighted sum across classes; the split assigns
  // every class the same configuration fractions, which matches a
  // bandwidth-proportional division of each content's capacity.
  const CapacityAllocation cap = greedy_capacity(spec);
  const double mean_bw = spec.mean_bandwidth();
  for (int ci = 0; ci < static_cast<int>(spec.classes.size()); ++ci) {
    double assigned = 0.0;
    for (int c = 0; c < cap.active; ++c) {
      const double q = cap.per_content[static_cast<std::size_t>(c)] / mean_bw;
      if (q <= 0.0) continue;
      table.entries.push_back({ci, {c}, q});
      assigned += q;
    }
    if (assigned < 1.0 - 1e-12)
      table.entries.push_back({ci, {}, 1.0 - assigned});
  }
  return table;
}

}  // namespace cdnsim
