// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "cdnsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "cdnsim/errors.hpp"

namespace cdnsim {

std::string to_string(ServiceDist dist) {
  switch (dist) {
    case ServiceDist::exponential: return "exp";
    case ServiceDist::constant: return "const";
    case ServiceDist::lognormal: return "lognorm";
    case ServiceDist::pareto: return "pareto";
  }
  return "?";
}

ServiceDist dist_from_string(const std::string& name) {
  if (name == "exp" || name == "exponential") return ServiceDist::exponential;
  if (name == "const" || name == "constant") return ServiceDist::constant;
  if (name == "lognorm" || name == "lognormal") return ServiceDist::lognormal;
  if (name == "pareto") return ServiceDist::pareto;
  throw MalformedConfig("unknown service distribution '" + name + "'");
}

double sample_service(ServiceDist dist, Rng& rng) {
  switch (dist) {
    case ServiceDist::exponential:
      return -std::log1p(-rng.uniform01());
    case ServiceDist::constant:
      return 1.0;
    case ServiceDist::lognormal: {
      // Box-Muller; mean exp(-0.5 + 0.5) = 1.
      const double u1 = rng.uniform01();
      const double u2 = rng.uniform01();
      const double z = std::sqrt(-2.0 * std::log1p(-u1)) *
                       std::cos(2.0 * std::numbers::pi * u2);
      return std::exp(-0.5 + z);
    }
    case ServiceDist::pareto:
      // Inverse CDF of shape 10, scale 0.9; mean 10*0.9/9 = 1.
      return 0.9 * std::pow(1.0 - rng.uniform01(), -0.1);
  }
  return 1.0;
}

LossSim::LossSim(const SystemSpec& spec, const Allocation& alloc,
                 const SimOptions& opts)
    : spec_(&spec), fleet_(spec.explicit_fleet()), opts_(opts), rng_(opts.seed) {
  const int n = static_cast<int>(fleet_.size());
  const int m = spec.num_contents();
  if (alloc.num_servers() != n)
    throw AllocationMismatch("allocation covers " +
                             std::to_string(alloc.num_servers()) +
                             " servers, fleet has " + std::to_string(n));
  stored_.resize(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    auto contents = alloc.stored[static_cast<std::size_t>(s)];
    std::sort(contents.begin(), contents.end());
    for (int c : contents)
      if (c < 0 || c >= m)
        throw AllocationMismatch("allocation stores unknown content " +
                                 std::to_string(c + 1));
    if (static_cast<int>(contents.size()) >
        fleet_[static_cast<std::size_t>(s)].cache_size)
      throw AllocationMismatch("allocation overfills server " +
                               std::to_string(s + 1));
    stored_[static_cast<std::size_t>(s)] = std::move(contents);
  }

  residual_.resize(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s)
    residual_[static_cast<std::size_t>(s)] = fleet_[static_cast<std::size_t>(s)].bandwidth;

  avail_.assign(static_cast<std::size_t>(m), {});
  pos_.resize(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    pos_[static_cast<std::size_t>(s)].assign(stored_[static_cast<std::size_t>(s)].size(), -1);
    attach_to_availability(s);
  }

  cumulative_rates_.resize(static_cast<std::size_t>(m));
  double cum = 0.0;
  for (int c = 0; c < m; ++c) {
    cum += spec.catalog.rates[static_cast<std::size_t>(c)];
    cumulative_rates_[static_cast<std::size_t>(c)] = cum;
  }
  total_rate_ = cum;

  metrics_.per_content_arrivals.assign(static_cast<std::size_t>(m), 0);
  metrics_.per_content_blocked.assign(static_cast<std::size_t>(m), 0);

  warmup_count_ = static_cast<long long>(
      std::floor(opts.warmup_fraction * static_cast<double>(opts.num_arrivals)));
  measuring_ = warmup_count_ == 0;

  if (opts_.sample_interval > 0.0) {
    metrics_.trajectory.push_back({0.0, 0.0});
    next_sample_ = opts_.sample_interval;
  }
  schedule_next_arrival();
}

int LossSim::slot_of(int server, int content) const {
  const auto& contents = stored_[static_cast<std::size_t>(server)];
  const auto it = std::lower_bound(contents.begin(), contents.end(), content);
  return static_cast<int>(it - contents.begin());
}

void LossSim::attach_to_availability(int server) {
  const auto& contents = stored_[static_cast<std::size_t>(server)];
  for (std::size_t slot = 0; slot < contents.size(); ++slot) {
    auto& list = avail_[static_cast<std::size_t>(contents[slot])];
    pos_[static_cast<std::size_t>(server)][slot] = static_cast<int>(list.size());
    list.push_back(server);
  }
}

void LossSim::detach_from_availability(int server) {
  const auto& contents = stored_[static_cast<std::size_t>(server)];
  for (std::size_t slot = 0; slot < contents.size(); ++slot) {
    const int content = contents[slot];
    auto& list = avail_[static_cast<std::size_t>(content)];
    const int idx = pos_[static_cast<std::size_t>(server)][slot];
    const int moved = list.back();
    list[static_cast<std::size_t>(idx)] = moved;
    list.pop_back();
    if (moved != server)
      pos_[static_cast<std::size_t>(moved)][static_cast<std::size_t>(slot_of(moved, content))] = idx;
    pos_[static_cast<std::size_t>(server)][slot] = -1;
  }
}

std::optional<int> LossSim::match(int content) {
  auto& list = avail_[static_cast<std::size_t>(content)];
  if (list.empty()) return std::nullopt;
  const int server = list[static_cast<std::size_t>(rng_.below(list.size()))];
  if (--residual_[static_cast<std::size_t>(server)] == 0)
    detach_from_availability(server);
  ++in_service_total_;
  return server;
}

void LossSim::release(int server) {
  if (++residual_[static_cast<std::size_t>(server)] == 1)
    attach_to_availability(server);
  --in_service_total_;
}

int LossSim::draw_content() {
  const double u = rng_.uniform01() * total_rate_;
  const auto it =
      std::upper_bound(cumulative_rates_.begin(), cumulative_rates_.end(), u);
  return static_cast<int>(std::min<std::ptrdiff_t>(
      it - cumulative_rates_.begin(),
      static_cast<std::ptrdiff_t>(cumulative_rates_.size()) - 1));
}

void LossSim::schedule_next_arrival() {
  next_arrival_ = clock_ - std::log1p(-rng_.uniform01()) / total_rate_;
}

void LossSim::advance_clock(double t) {
  if (opts_.sample_interval > 0.0) {
    const double n = static_cast<double>(spec_->n);
    while (next_sample_ <= t && next_sample_ <= opts_.max_time) {
      metrics_.trajectory.push_back(
          {next_sample_, static_cast<double>(in_service_total_) / n});
      next_sample_ += opts_.sample_interval;
    }
  }
  if (measuring_)
    in_service_integral_ += static_cast<double>(in_service_total_) * (t - clock_);
  clock_ = t;
}

void LossSim::on_arrival() {
  advance_clock(next_arrival_);
  if (arrivals_seen_ == warmup_count_ && warmup_count_ > 0) {
    measuring_ = true;
    measure_start_ = clock_;
    in_service_integral_ = 0.0;
  }
  ++arrivals_seen_;

  const int content = draw_content();
  const bool counted = arrivals_seen_ > warmup_count_;
  if (counted) {
    ++metrics_.arrivals;
    ++metrics_.per_content_arrivals[static_cast<std::size_t>(content)];
  }

  if (const auto server = match(content)) {
    departures_.push({clock_ + sample_service(opts_.dist, rng_), departure_order_++,
                      *server});
  } else if (counted) {
    ++metrics_.blocked;
    ++metrics_.per_content_blocked[static_cast<std::size_t>(content)];
  }

  if (arrivals_seen_ < opts_.num_arrivals) schedule_next_arrival();
}

bool LossSim::step() {
  const bool arrivals_left =
      arrivals_seen_ < opts_.num_arrivals && next_arrival_ <= opts_.max_time;
  const bool departures_left =
      !departures_.empty() && departures_.top().time <= opts_.max_time;

  if (arrivals_left &&
      (!departures_left || next_arrival_ <= departures_.top().time)) {
    on_arrival();
    return true;
  }

  // Once the arrival budget is spent, pending departures are only drained
  // when a finite horizon asks for the full trajectory up to it.
  const bool stop_at_last_arrival = arrivals_seen_ >= opts_.num_arrivals &&
                                    !std::isfinite(opts_.max_time);
  if (departures_left && !stop_at_last_arrival) {
    const Departure d = departures_.top();
    departures_.pop();
    advance_clock(d.time);
    release(d.server);
    return true;
  }
  return false;
}

void LossSim::run() {
  while (step()) {
  }
  if (std::isfinite(opts_.max_time) && clock_ < opts_.max_time)
    advance_clock(opts_.max_time);
}

std::pair<ConfigTable, ConfigState> LossSim::occupancy_snapshot() const {
  std::map<std::pair<int, std::vector<int>>, std::vector<int>> groups;
  for (int s = 0; s < static_cast<int>(fleet_.size()); ++s)
    groups[{fleet_[static_cast<std::size_t>(s)].class_index,
            stored_[static_cast<std::size_t>(s)]}]
        .push_back(s);

  ConfigTable table;
  ConfigState state;
  for (const auto& [key, members] : groups) {
    const auto& [class_index, contents] = key;
    const long class_count = spec_->classes[static_cast<std::size_t>(class_index)].count;
    table.entries.push_back(
        {class_index, contents,
         static_cast<double>(members.size()) / static_cast<double>(class_count)});

    const int u = spec_->classes[static_cast<std::size_t>(class_index)].bandwidth;
    std::vector<double> tail(static_cast<std::size_t>(u) + 1, 0.0);
    for (int server : members) {
      const int occupied = in_service(server);
      for (int r = 0; r <= occupied; ++r) tail[static_cast<std::size_t>(r)] += 1.0;
    }
    for (double& v : tail) v /= static_cast<double>(members.size());
    state.tails.push_back(std::move(tail));
  }
  return {std::move(table), std::move(state)};
}

Metrics LossSim::finish() {
  metrics_.duration = measuring_ ? clock_ - measure_start_ : 0.0;
  metrics_.time_avg_in_service =
      metrics_.duration > 0.0 ? in_service_integral_ / metrics_.duration : 0.0;
  return metrics_;
}

Metrics simulate(const SystemSpec& spec, const Allocation& alloc,
                 const SimOptions& opts) {
  LossSim sim(spec, alloc, opts);
  sim.run();
  return sim.finish();
}

}  // namespace cdnsim
