// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <set>

#include "gnnperf/netgraph.hpp"

namespace gnnperf::net {

std::string_view to_string(Policy p) {
  switch (p) {
    case Policy::fifo: return "FIFO";
    case Policy::sp: return "SP";
    case Policy::wfq: return "WFQ";
    case Policy::drr: return "DRR";
  }
  return "?";
}

Policy parse_policy(std::string_view s) {
  if (s == "FIFO" || s == "fifo") return Policy::fifo;
  if (s == "SP" || s == "sp") return Policy::sp;
  if (s == "WFQ" || s == "wfq") return Policy::wfq;
  if (s == "DRR" || s == "drr") return Policy::drr;
  throw DataError("unknown scheduling policy '" + std::string(s) + "'");
}

std::string_view to_string(TopologyKind k) {
  switch (k) {
    case TopologyKind::power_law: return "power-law";
    case TopologyKind::fat_tree: return "fat-tree";
    case TopologyKind::grid: return "grid";
  }
  return "?";
}

TopologyKind parse_topology_kind(std::string_view s) {
  if (s == "power-law" || s == "power_law") return TopologyKind::power_law;
  if (s == "fat-tree" || s == "fat_tree") return TopologyKind::fat_tree;
  if (s == "grid") return TopologyKind::grid;
  throw DataError("unknown topology kind '" + std::string(s) + "'");
}

Topology::Topology(int node_count, std::vector<Link> links) : node_count_(node_count), links_(std::move(links)) {
  index();
}

void Topology::index() {
  out_links_.assign(static_cast<std::size_t>(std::max(node_count_, 0)), {});
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const int s = links_[i].src;
    if (s >= 0 && s < node_count_) out_links_[static_cast<std::size_t>(s)].push_back(static_cast<int>(i));
  }
  for (auto& v : out_links_) {
    std::stable_sort(v.begin(), v.end(), [&](int a, int b) {
      return links_[static_cast<std::size_t>(a)].dst < links_[static_cast<std::size_t>(b)].dst;
    });
  }
}

int Topology::find_link(int src, int dst) const {
  if (src < 0 || src >= node_count_) return -1;
  for (int l : out_links_[static_cast<std::size_t>(src)]) {
    if (links_[static_cast<std::size_t>(l)].dst == dst) return l;
  }
  return -1;
}

std::size_t Topology::edge_count() const {
  std::set<std::pair<int, int>> edges;
  for (const auto& l : links_) edges.emplace(std::min(l.src, l.dst), std::max(l.src, l.dst));
  return edges.size();
}

bool Topology::connected() const {
  if (node_count_ <= 0) return false;
  auto reach = [&](bool reverse) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(node_count_));
    for (const auto& l : links_) {
      if (reverse) adj[static_cast<std::size_t>(l.dst)].push_back(l.src);
      else adj[static_cast<std::size_t>(l.src)].push_back(l.dst);
    }
    std::vector<char> seen(static_cast<std::size_t>(node_count_), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : adj[static_cast<std::size_t>(u)]) {
        if (!seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == node_count_;
  };
  return reach(false) && reach(true);
}

void Topology::validate() const {
  if (node_count_ < 1) throw DataError("topology has no nodes");
  std::set<std::pair<int, int>> seen;
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const auto& l = links_[i];
    const std::string where = "link " + std::to_string(i);
    if (l.src < 0 || l.src >= node_count_ || l.dst < 0 || l.dst >= node_count_) {
      throw DataError(where + ": endpoint out of range");
    }
    if (l.src == l.dst) throw DataError(where + ": self-loop");
    if (!seen.emplace(l.src, l.dst).second) throw DataError(where + ": duplicate link");
    if (!(l.capacity_bps > 0.0)) throw DataError(where + ": capacity must be positive");
    if (l.queues.empty()) throw DataError(where + ": no queues");
    for (std::size_t q = 0; q < l.queues.size(); ++q) {
      const auto& qu = l.queues[q];
      if (qu.priority != static_cast<int>(q)) throw DataError(where + ": queue priorities must be 0..n-1 in order");
      if (!(qu.buffer_bits > 0.0)) throw DataError(where + ": buffer size must be positive");
      if (!(qu.weight > 0.0)) throw DataError(where + ": queue weight must be positive");
      if (qu.policy != l.queues[0].policy) throw DataError(where + ": mixed scheduling policies on one port");
    }
  }
  if (!connected()) throw DataError("topology is not connected");
}

namespace {

Queue default_queue() { return Queue{Policy::fifo, 32000.0, 0, 1.0}; }

Topology from_edges(int n, std::set<std::pair<int, int>> edges, const std::vector<double>& capacities,
                    std::mt19937_64& rng) {
  if (capacities.empty()) throw DataError("topology config: empty capacity set");
  std::uniform_int_distribution<std::size_t> pick(0, capacities.size() - 1);
  std::vector<Link> links;
  for (const auto& [u, v] : edges) {
    const double cap = capacities[pick(rng)];
    links.push_back(Link{u, v, cap, {default_queue()}});
    links.push_back(Link{v, u, cap, {default_queue()}});
  }
  return Topology(n, std::move(links));
}

Topology power_law(const TopologyConfig& c, std::mt19937_64& rng) {
  if (c.min_nodes < 3 || c.max_nodes < c.min_nodes) {
    throw DataError("power-law topology needs 3 <= min_nodes <= max_nodes");
  }
  if (!(c.exponent > 0.0)) throw DataError("power-law exponent must be positive");
  const int n = std::uniform_int_distribution<int>(c.min_nodes, c.max_nodes)(rng);
  // Truncated power law over out-degrees 1..n-1.
  std::vector<double> w;
  for (int d = 1; d < n; ++d) w.push_back(std::pow(static_cast<double>(d), -c.exponent));
  std::discrete_distribution<int> degree(w.begin(), w.end());

  std::set<std::pair<int, int>> edges;
  std::vector<int> others;
  for (int u = 0; u < n; ++u) {
    const int d = degree(rng) + 1;
    others.clear();
    for (int v = 0; v < n; ++v)
      if (v != u) others.push_back(v);
    std::shuffle(others.begin(), others.end(), rng);
    for (int i = 0; i < d; ++i) edges.emplace(std::min(u, others[i]), std::max(u, others[i]));
  }

  // Connectivity repair: attach each further component to the ones before it.
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (const auto& [u, v] : edges) {
    adj[static_cast<std::size_t>(u)].push_back(v);
    adj[static_cast<std::size_t>(v)].push_back(u);
  }
  std::vector<std::vector<int>> members;
  for (int s = 0; s < n; ++s) {
    if (comp[static_cast<std::size_t>(s)] >= 0) continue;
    const int id = static_cast<int>(members.size());
    members.emplace_back();
    std::vector<int> stack{s};
    comp[static_cast<std::size_t>(s)] = id;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      members.back().push_back(u);
      for (int v : adj[static_cast<std::size_t>(u)]) {
        if (comp[static_cast<std::size_t>(v)] < 0) {
          comp[static_cast<std::size_t>(v)] = id;
          stack.push_back(v);
        }
      }
    }
  }
  std::vector<int> joined = members[0];
  for (std::size_t c2 = 1; c2 < members.size(); ++c2) {
    const auto& m = members[c2];
    const int a = m[std::uniform_int_distribution<std::size_t>(0, m.size() - 1)(rng)];
    const int b = joined[std::uniform_int_distribution<std::size_t>(0, joined.size() - 1)(rng)];
    edges.emplace(std::min(a, b), std::max(a, b));
    joined.insert(joined.end(), m.begin(), m.end());
  }
  return from_edges(n, std::move(edges), c.capacities_bps, rng);
}

Topology fat_tree(const TopologyConfig& c, std::mt19937_64& rng) {
  const int k = c.k;
  if (k < 2 || k % 2 != 0) throw DataError("fat-tree arity k must be even and >= 2");
  const int half = k / 2;
  const int cores = half * half;
  // ids: cores, then per pod `half` aggregation followed by `half` edge switches.
  auto agg = [&](int pod, int i) { return cores + pod * k + i; };
  auto edge = [&](int pod, int i) { return cores + pod * k + half + i; };
  std::set<std::pair<int, int>> edges;
  for (int pod = 0; pod < k; ++pod) {
    for (int a = 0; a < half; ++a) {
      for (int j = 0; j < half; ++j) edges.emplace(a * half + j, agg(pod, a));
      for (int e = 0; e < half; ++e) edges.emplace(agg(pod, a), edge(pod, e));
    }
  }
  return from_edges(cores + k * k, std::move(edges), c.capacities_bps, rng);
}

Topology grid(const TopologyConfig& c, std::mt19937_64& rng) {
  if (c.rows < 1 || c.cols < 1 || c.rows * c.cols < 2) throw DataError("grid needs at least two nodes");
  std::set<std::pair<int, int>> edges;
  for (int r = 0; r < c.rows; ++r)
    for (int col = 0; col < c.cols; ++col) {
      const int u = r * c.cols + col;
      if (col + 1 < c.cols) edges.emplace(u, u + 1);
      if (r + 1 < c.rows) edges.emplace(u, u + c.cols);
    }
  return from_edges(c.rows * c.cols, std::move(edges), c.capacities_bps, rng);
}

}  // namespace

Topology generate_topology(const TopologyConfig& config, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Topology t;
  switch (config.kind) {
    case TopologyKind::power_law: t = power_law(config, rng); break;
    case TopologyKind::fat_tree: t = fat_tree(config, rng); break;
    case TopologyKind::grid: t = grid(config, rng); break;
  }
  t.validate();
  return t;
}

}  // namespace gnnperf::net
