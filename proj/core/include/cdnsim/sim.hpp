// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "cdnsim/config.hpp"
#include "cdnsim/matching.hpp"
#include "cdnsim/model.hpp"
#include "cdnsim/rng.hpp"

namespace cdnsim {

/// Service time laws, all with unit mean.
enum class ServiceDist {
  exponential,  // rate 1
  constant,     // always 1
  lognormal,    // location -0.5, scale 1
  pareto,       // shape 10, scale 0.9
};

std::string to_string(ServiceDist dist);
ServiceDist dist_from_string(const std::string& name);

double sample_service(ServiceDist dist, Rng& rng);

struct TrajectorySample {
  double t = 0.0;
  double y = 0.0;  // in-service count over n

  bool operator==(const TrajectorySample&) const = default;
};

struct Metrics {
  long long arrivals = 0;  // counted after warm-up
  long long blocked = 0;
  std::vector<long long> per_content_arrivals;
  std::vector<long long> per_content_blocked;
  double time_avg_in_service = 0.0;
  double duration = 0.0;  // measurement window length
  std::vector<TrajectorySample> trajectory;

  double blocking_prob() const {
    return arrivals > 0 ? static_cast<double>(blocked) / static_cast<double>(arrivals)
                        : 0.0;
  }
  bool operator==(const Metrics&) const = default;
};

struct SimOptions {
  ServiceDist dist = ServiceDist::exponential;
  long long num_arrivals = 160000;
  std::uint64_t seed = 1;
  double warmup_fraction = 0.0;  // share of arrivals excluded from counters
  double sample_interval = 0.0;  // trajectory grid step; 0 disables sampling
  double max_time = std::numeric_limits<double>::infinity();
};

/// Event-driven loss system under random-available-server dispatch.
///
/// Requests arrive as one Poisson stream at the total catalog rate; each
/// arrival is thinned to a content by normalized popularity, matched to a
/// uniformly random available server, and (if accepted) departs after an
/// i.i.d. service time. A server is available for a content while it stores
/// it and serves fewer than bandwidth requests. Availability lists are
/// updated incrementally on the saturation/desaturation edges, mirroring
/// dispatcher-side bookkeeping fed by server messages.
class LossSim {
 public:
  LossSim(const SystemSpec& spec, const Allocation& alloc, const SimOptions& opts);

  /// Applies the next event. Returns false when the arrival budget is spent
  /// (and, if a finite max_time is set, pending departures up to it have
  /// drained).
  bool step();
  void run();

  /// RAS dispatch of one request; returns the chosen server, or nullopt for
  /// a blocked request. Counters are not touched.
  std::optional<int> match(int content);
  /// Books one departure from the server.
  void release(int server);

  std::span<const int> availability(int content) const {
    return avail_[static_cast<std::size_t>(content)];
  }
  int in_service(int server) const {
    return fleet_[static_cast<std::size_t>(server)].bandwidth -
           residual_[static_cast<std::size_t>(server)];
  }
  long long total_in_service() const { return in_service_total_; }
  double clock() const { return clock_; }
  Rng& rng() { return rng_; }

  /// Empirical configuration weights (class, cache set) and their occupancy
  /// tails at the current instant.
  std::pair<ConfigTable, ConfigState> occupancy_snapshot() const;

  Metrics finish();

 private:
  void schedule_next_arrival();
  void on_arrival();
  void advance_clock(double t);
  void detach_from_availability(int server);
  void attach_to_availability(int server);
  int slot_of(int server, int content) const;
  int draw_content();

  const SystemSpec* spec_;
  std::vector<Server> fleet_;
  std::vector<std::vector<int>> stored_;
  std::vector<int> residual_;
  std::vector<std::vector<int>> avail_;
  std::vector<std::vector<int>> pos_;  // pos_[s][slot] = index in avail list
  std::vector<double> cumulative_rates_;
  double total_rate_ = 0.0;

  SimOptions opts_;
  Rng rng_;
  double clock_ = 0.0;
  double next_arrival_ = 0.0;
  long long arrivals_seen_ = 0;
  long long warmup_count_ = 0;
  long long in_service_total_ = 0;
  double measure_start_ = 0.0;
  bool measuring_ = false;
  double in_service_integral_ = 0.0;
  double next_sample_ = 0.0;

  struct Departure {
    double time;
    long long order;
    int server;
    bool operator>(const Departure& other) const {
      return std::tie(time, order) > std::tie(other.time, other.order);
    }
  };
  std::priority_queue<Departure, std::vector<Departure>, std::greater<>> departures_;
  long long departure_order_ = 0;

  Metrics metrics_;
};

Metrics simulate(const SystemSpec& spec, const Allocation& alloc,
                 const SimOptions& opts = {});

}  // namespace cdnsim
