// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace cdnsim::detail {

// Dinic max-flow on integer capacities. Small and deterministic; the graphs
// here are shallow bipartite networks (source, servers, contents, sink).
class MaxFlow {
 public:
  explicit MaxFlow(int num_nodes) : head_(static_cast<std::size_t>(num_nodes), -1) {}

  int add_edge(int from, int to, std::int64_t cap) {
    const int id = static_cast<int>(edges_.size());
    edges_.push_back({to, head_[static_cast<std::size_t>(from)], cap});
    head_[static_cast<std::size_t>(from)] = id;
    edges_.push_back({from, head_[static_cast<std::size_t>(to)], 0});
    head_[static_cast<std::size_t>(to)] = id + 1;
    return id;
  }

  std::int64_t run(int source, int sink) {
    std::int64_t total = 0;
    while (bfs(source, sink)) {
      iter_ = head_;
      while (std::int64_t pushed =
                 dfs(source, sink, std::numeric_limits<std::int64_t>::max()))
        total += pushed;
    }
    return total;
  }

  /// Flow pushed through the edge returned by add_edge.
  std::int64_t flow_on(int edge_id) const {
    return edges_[static_cast<std::size_t>(edge_id) + 1].cap;
  }

 private:
  struct Edge {
    int to;
    int next;
    std::int64_t cap;
  };

  bool bfs(int source, int sink) {
    level_.assign(head_.size(), -1);
    level_[static_cast<std::size_t>(source)] = 0;
    queue_.clear();
    queue_.push_back(source);
    for (std::size_t qi = 0; qi < queue_.size(); ++qi) {
      const int u = queue_[qi];
      for (int e = head_[static_cast<std::size_t>(u)]; e != -1;
           e = edges_[static_cast<std::size_t>(e)].next) {
        const Edge& edge = edges_[static_cast<std::size_t>(e)];
        if (edge.cap > 0 && level_[static_cast<std::size_t>(edge.to)] < 0) {
          level_[static_cast<std::size_t>(edge.to)] =
              level_[static_cast<std::size_t>(u)] + 1;
          queue_.push_back(edge.to);
        }
      }
    }
    return level_[static_cast<std::size_t>(sink)] >= 0;
  }

  std::int64_t dfs(int u, int sink, std::int64_t limit) {
    if (u == sink) return limit;
    for (int& e = iter_[static_cast<std::size_t>(u)]; e != -1;
         e = edges_[static_cast<std::size_t>(e)].next) {
      Edge& edge = edges_[static_cast<std::size_t>(e)];
      if (edge.cap <= 0 ||
          level_[static_cast<std::size_t>(edge.to)] !=
              level_[static_cast<std::size_t>(u)] + 1)
        continue;
      const std::int64_t pushed =
          dfs(edge.to, sink, std::min(limit, edge.cap));
      if (pushed > 0) {
        edge.cap -= pushed;
        edges_[static_cast<std::size_t>(e ^ 1)].cap += pushed;
        return pushed;
      }
    }
    return 0;
  }

  std::vector<int> head_;
  std::vector<Edge> edges_;
  std::vector<int> level_;
  std::vector<int> iter_;
  std::vector<int> queue_;
};

}  // namespace cdnsim::detail
