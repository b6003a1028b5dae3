// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "gnnperf/netgraph.hpp"

namespace gnnperf::net {

std::string_view to_string(TrafficModel m) {
  switch (m) {
    case TrafficModel::poisson: return "poisson";
    case TrafficModel::cbr: return "cbr";
    case TrafficModel::on_off: return "on-off";
    case TrafficModel::autocorrelated_exp: return "autocorrelated-exp";
    case TrafficModel::modulated_exp: return "modulated-exp";
  }
  return "?";
}

TrafficModel parse_traffic_model(std::string_view s) {
  if (s == "poisson") return TrafficModel::poisson;
  if (s == "cbr") return TrafficModel::cbr;
  if (s == "on-off" || s == "onoff" || s == "on_off") return TrafficModel::on_off;
  if (s == "autocorrelated-exp" || s == "autocorrelated") return TrafficModel::autocorrelated_exp;
  if (s == "modulated-exp" || s == "modulated") return TrafficModel::modulated_exp;
  throw DataError("unknown traffic model '" + std::string(s) + "'");
}

std::string_view to_string(SizeDistribution d) {
  switch (d) {
    case SizeDistribution::binomial: return "binomial";
    case SizeDistribution::exponential: return "exponential";
    case SizeDistribution::fixed: return "fixed";
  }
  return "?";
}

SizeDistribution parse_size_distribution(std::string_view s) {
  if (s == "binomial") return SizeDistribution::binomial;
  if (s == "exponential") return SizeDistribution::exponential;
  if (s == "fixed") return SizeDistribution::fixed;
  throw DataError("unknown packet size distribution '" + std::string(s) + "'");
}

double TrafficDescriptor::mean_packet_bits() const {
  return params.size_dist == SizeDistribution::binomial ? 1000.0 : params.size_mean_bits;
}

void Sample::validate() const {
  topology.validate();
  const auto& links = topology.links();
  std::set<int> ids;
  for (std::size_t f = 0; f < flows.size(); ++f) {
    const auto& flow = flows[f];
    const std::string where = "flow " + std::to_string(flow.id);
    if (!ids.insert(flow.id).second) throw DataError(where + ": duplicate id");
    if (flow.path.empty()) throw DataError(where + ": empty path");
    if (!(flow.traffic.avg_rate_bps > 0.0)) throw DataError(where + ": rate must be positive");
    if (flow.traffic.tos < 0 || flow.traffic.tos > 2) throw DataError(where + ": ToS must be 0, 1 or 2");
    std::set<int> visited{flow.src};
    int at = flow.src;
    for (std::size_t h = 0; h < flow.path.size(); ++h) {
      const auto& hop = flow.path[h];
      if (hop.link < 0 || static_cast<std::size_t>(hop.link) >= links.size()) {
        throw DataError(where + ": hop " + std::to_string(h) + " references missing link " + std::to_string(hop.link));
      }
      const auto& l = links[static_cast<std::size_t>(hop.link)];
      if (hop.queue < 0 || static_cast<std::size_t>(hop.queue) >= l.queues.size()) {
        throw DataError(where + ": hop " + std::to_string(h) + " references missing queue " +
                        std::to_string(hop.queue));
      }
      if (l.src != at) throw DataError(where + ": path is not contiguous at hop " + std::to_string(h));
      at = l.dst;
      if (!visited.insert(at).second) throw DataError(where + ": path revisits node " + std::to_string(at));
    }
    if (at != flow.dst) throw DataError(where + ": path does not end at the destination");
  }
  if (labels) {
    if (labels->size() != flows.size()) throw DataError("label count does not match flow count");
    for (std::size_t f = 0; f < flows.size(); ++f) {
      const auto& l = (*labels)[f];
      const std::string where = "label of flow " + std::to_string(flows[f].id);
      if (!(l.delay_s > 0.0) || !std::isfinite(l.delay_s)) throw DataError(where + ": delay must be positive");
      if (!(l.jitter_s2 >= 0.0) || !std::isfinite(l.jitter_s2)) throw DataError(where + ": jitter must be >= 0");
      if (!(l.loss >= 0.0 && l.loss <= 1.0)) throw DataError(where + ": loss must be in [0, 1]");
    }
  }
}

double transmission_lower_bound(const Sample& sample, const Flow& flow) {
  double t = 0.0;
  const double size = flow.traffic.mean_packet_bits();
  for (const auto& hop : flow.path) t += size / sample.topology.links()[static_cast<std::size_t>(hop.link)].capacity_bps;
  return t;
}

Sample build_sample(const Topology& topo, int n_flows, const TrafficConfig& traffic, const QueueConfig& queues,
                    std::uint64_t seed) {
  if (n_flows < 1) throw DataError("build_sample: need at least one flow");
  if (topo.node_count() < 2) throw DataError("build_sample: need at least two nodes");
  if (queues.policies.empty() || queues.buffer_bits.empty() || queues.weight_sets.empty()) {
    throw DataError("build_sample: empty queue configuration");
  }
  if (traffic.models.empty()) throw DataError("build_sample: no traffic models");
  if (!(traffic.max_lambda_min_bps > 0.0) || traffic.max_lambda_max_bps < traffic.max_lambda_min_bps) {
    throw DataError("build_sample: invalid max_lambda range");
  }
  for (const auto& ws : queues.weight_sets) {
    if (ws.size() != 3 || std::any_of(ws.begin(), ws.end(), [](double w) { return !(w > 0.0); })) {
      throw DataError("build_sample: weight sets need three positive weights");
    }
  }

  std::mt19937_64 rng(seed);
  Sample s;
  s.topology = topo;

  // Per-node scheduling configuration shared by every output port.
  auto& links = s.topology.mutable_links();
  const int n = topo.node_count();
  for (int node = 0; node < n; ++node) {
    const Policy policy = queues.policies[std::uniform_int_distribution<std::size_t>(0, queues.policies.size() - 1)(rng)];
    const double buffer = queues.buffer_bits[std::uniform_int_distribution<std::size_t>(0, queues.buffer_bits.size() - 1)(rng)];
    auto weights = queues.weight_sets[std::uniform_int_distribution<std::size_t>(0, queues.weight_sets.size() - 1)(rng)];
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (auto& w : weights) w /= total;
    for (int l : topo.out_links()[static_cast<std::size_t>(node)]) {
      auto& qs = links[static_cast<std::size_t>(l)].queues;
      qs.clear();
      if (policy == Policy::fifo) {
        qs.push_back(Queue{policy, buffer, 0, 1.0});
      } else {
        for (int p = 0; p < 3; ++p) qs.push_back(Queue{policy, buffer, p, weights[static_cast<std::size_t>(p)]});
      }
    }
  }

  const double max_lambda = std::uniform_real_distribution<double>(traffic.max_lambda_min_bps,
                                                                     std::nextafter(traffic.max_lambda_max_bps, 1e300))(rng);

  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b) pairs.emplace_back(a, b);
  std::vector<std::pair<int, int>> chosen;
  while (static_cast<int>(chosen.size()) < n_flows) {
    std::shuffle(pairs.begin(), pairs.end(), rng);
    for (const auto& p : pairs) {
      if (static_cast<int>(chosen.size()) == n_flows) break;
      chosen.push_back(p);
    }
  }

  std::uniform_real_distribution<double> scale(0.1, 1.0);
  std::uniform_int_distribution<int> tos_dist(0, 2);
  std::uniform_int_distribution<std::size_t> model_dist(0, traffic.models.size() - 1);
  for (int f = 0; f < n_flows; ++f) {
    Flow flow;
    flow.id = f;
    flow.src = chosen[static_cast<std::size_t>(f)].first;
    flow.dst = chosen[static_cast<std::size_t>(f)].second;
    flow.traffic.avg_rate_bps = max_lambda * scale(rng);
    flow.traffic.model = traffic.models[model_dist(rng)];
    flow.traffic.tos = traffic.random_tos ? tos_dist(rng) : 0;
    flow.traffic.params = traffic.params;
    for (int l : shortest_path_routing(s.topology, flow.src, flow.dst)) {
      const auto nq = static_cast<int>(links[static_cast<std::size_t>(l)].queues.size());
      flow.path.push_back(Hop{l, std::min(flow.traffic.tos, nq - 1)});
    }
    s.flows.push_back(std::move(flow));
  }
  s.provenance.seed = seed;
  s.provenance.duration_s = 0.0;
  s.validate();
  return s;
}

}  // namespace gnnperf::net
