// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#include <limits>
#include <queue>

#include "gnnperf/netgraph.hpp"

namespace gnnperf::net {

std::vector<int> shortest_path_nodes(const Topology& topo, int src, int dst) {
  const int n = topo.node_count();
  if (src < 0 || src >= n || dst < 0 || dst >= n) throw DataError("routing: endpoint out of range");
  if (src == dst) throw DataError("routing: source equals destination");

  // Hop distance to dst over reversed links.
  constexpr int kInf = std::numeric_limits<int>::max();
  std::vector<std::vector<int>> incoming(static_cast<std::size_t>(n));
  for (const auto& l : topo.links()) incoming[static_cast<std::size_t>(l.dst)].push_back(l.src);
  std::vector<int> dist(static_cast<std::size_t>(n), kInf);
  std::queue<int> frontier;
  dist[static_cast<std::size_t>(dst)] = 0;
  frontier.push(dst);
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v : incoming[static_cast<std::size_t>(u)]) {
      if (dist[static_cast<std::size_t>(v)] == kInf) {
        dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
        frontier.push(v);
      }
    }
  }
  if (dist[static_cast<std::size_t>(src)] == kInf) {
    throw DataError("routing: no path from " + std::to_string(src) + " to " + std::to_string(dst));
  }

  // Walk forward, always taking the smallest next-node id that stays on a
  // shortest path.
  std::vector<int> path{src};
  int u = src;
  while (u != dst) {
    for (int l : topo.out_links()[static_cast<std::size_t>(u)]) {
      const int v = topo.links()[static_cast<std::size_t>(l)].dst;
      if (dist[static_cast<std::size_t>(v)] == dist[static_cast<std::size_t>(u)] - 1) {
        u = v;
        break;
      }
    }
    path.push_back(u);
  }
  return path;
}

std::vector<int> shortest_path_routing(const Topology& topo, int src, int dst) {
  const auto nodes = shortest_path_nodes(topo, src, dst);
  std::vector<int> links;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) links.push_back(topo.find_link(nodes[i], nodes[i + 1]));
  return links;
}

}  // namespace gnnperf::net
