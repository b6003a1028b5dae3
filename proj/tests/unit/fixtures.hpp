// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

// Small hand-built networks and random generators shared by the tests.

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "gnnperf/dataset.hpp"
#include "gnnperf/netgraph.hpp"
#include "gnnperf/numcore.hpp"
#include "gnnperf/simulator.hpp"

namespace fixtures {

namespace net = gnnperf::net;
namespace num = gnnperf::num;

inline net::Link link(int src, int dst, double capacity, std::vector<net::Queue> queues = {net::Queue{}}) {
  net::Link l;
  l.src = src;
  l.dst = dst;
  l.capacity_bps = capacity;
  l.queues = std::move(queues);
  return l;
}

inline std::vector<net::Queue> three_queues(net::Policy p, std::vector<double> weights = {0.5, 0.3, 0.2},
                                            double buffer = 32000.0) {
  std::vector<net::Queue> qs;
  for (int i = 0; i < 3; ++i) qs.push_back(net::Queue{p, buffer, i, weights[i]});
  return qs;
}

// Bidirectional path 0 - 1 - ... - (n-1).
inline net::Topology line(int n, double capacity = 10000.0) {
  std::vector<net::Link> links;
  for (int i = 0; i + 1 < n; ++i) {
    links.push_back(link(i, i + 1, capacity));
    links.push_back(link(i + 1, i, capacity));
  }
  return net::Topology(n, std::move(links));
}

inline net::TrafficDescriptor traffic(net::TrafficModel model, double rate, int tos = 0,
                                      net::SizeDistribution size = net::SizeDistribution::binomial) {
  net::TrafficDescriptor d;
  d.model = model;
  d.avg_rate_bps = rate;
  d.tos = tos;
  d.params.size_dist = size;
  return d;
}

// Flow routed along the shortest path, using queue `tos` where it exists.
inline net::Flow routed_flow(const net::Topology& t, int id, int src, int dst, net::TrafficDescriptor d) {
  net::Flow f;
  f.id = id;
  f.src = src;
  f.dst = dst;
  f.traffic = d;
  for (int l : net::shortest_path_routing(t, src, dst)) {
    const int nq = static_cast<int>(t.links()[l].queues.size());
    f.path.push_back(net::Hop{l, d.tos < nq ? d.tos : nq - 1});
  }
  return f;
}

inline net::Sample sample_of(net::Topology t, std::vector<net::Flow> flows) {
  net::Sample s;
  s.topology = std::move(t);
  s.flows = std::move(flows);
  return s;
}

// Unlabeled random sample on a power-law graph.
inline net::Sample random_sample(std::uint64_t seed, int min_nodes = 4, int max_nodes = 8, int min_flows = 2,
                                 int max_flows = 10, double max_lambda = 2000.0) {
  std::mt19937_64 rng(seed);
  net::TopologyConfig tc;
  tc.min_nodes = min_nodes;
  tc.max_nodes = max_nodes;
  const net::Topology topo = net::generate_topology(tc, rng());
  net::TrafficConfig traffic;
  traffic.max_lambda_min_bps = max_lambda;
  traffic.max_lambda_max_bps = max_lambda;
  traffic.models = {net::TrafficModel::poisson, net::TrafficModel::cbr, net::TrafficModel::on_off,
                    net::TrafficModel::autocorrelated_exp, net::TrafficModel::modulated_exp};
  net::QueueConfig queues;
  queues.policies = {net::Policy::fifo, net::Policy::sp, net::Policy::wfq, net::Policy::drr};
  queues.buffer_bits = {8000.0, 32000.0, 64000.0};
  const int flows = std::uniform_int_distribution<int>(min_flows, max_flows)(rng);
  return net::build_sample(topo, flows, traffic, queues, rng());
}

// Labels that satisfy the sample invariants without running the simulator.
inline void synthetic_labels(net::Sample& s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<net::FlowLabel> labels;
  for (const auto& f : s.flows) {
    const double lb = net::transmission_lower_bound(s, f);
    labels.push_back(net::FlowLabel{lb * (1.0 + 3.0 * u(rng)), lb * lb * u(rng), 0.1 * u(rng)});
  }
  s.labels = labels;
}

// Simulated labels with a short duration.
inline net::Sample simulated(net::Sample s, std::uint64_t seed, double duration = 400.0) {
  gnnperf::sim::SimConfig c;
  c.duration_s = duration;
  c.seed = seed;
  s.labels = gnnperf::sim::run_simulation(s, c);
  s.provenance.seed = seed;
  s.provenance.duration_s = duration;
  return s;
}

// The three-node network used by gradient checks: a line with three flows.
inline net::Sample three_node_sample() {
  net::Topology t = line(3, 10000.0);
  std::vector<net::Flow> flows{routed_flow(t, 0, 0, 2, traffic(net::TrafficModel::poisson, 3000.0)),
                               routed_flow(t, 1, 1, 2, traffic(net::TrafficModel::cbr, 5000.0)),
                               routed_flow(t, 2, 2, 0, traffic(net::TrafficModel::poisson, 1500.0))};
  net::Sample s = sample_of(std::move(t), std::move(flows));
  s.labels = std::vector<net::FlowLabel>{{0.5, 0.01, 0.0}, {0.3, 0.02, 0.01}, {0.25, 0.005, 0.0}};
  return s;
}

inline num::Tensor random_tensor(num::Shape shape, std::mt19937_64& rng, double scale = 1.0,
                                 bool requires_grad = false) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return num::Tensor::from(std::move(shape), std::move(v), requires_grad);
}

}  // namespace fixtures
