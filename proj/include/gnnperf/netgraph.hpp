// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gnnperf::net {

inline constexpr std::string_view kFormatVersion = "gnnperf-dataset/1";

// Malformed or inconsistent network data. Serialization errors carry the
// line, byte offset or field that failed.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Policy { fifo, sp, wfq, drr };
std::string_view to_string(Policy p);
Policy parse_policy(std::string_view s);

struct Queue {
  Policy policy = Policy::fifo;
  double buffer_bits = 32000.0;
  int priority = 0;
  // Scheduling weight for WFQ/DRR; normalized to sum 1 per link.
  double weight = 1.0;

  bool operator==(const Queue&) const = default;
};

// Directed output port from src to dst. queues are in priority order,
// index 0 highest.
struct Link {
  int src = 0;
  int dst = 0;
  double capacity_bps = 0.0;
  std::vector<Queue> queues;

  bool operator==(const Link&) const = default;
};

class Topology {
 public:
  Topology() = default;
  Topology(int node_count, std::vector<Link> links);

  int node_count() const { return node_count_; }
  const std::vector<Link>& links() const { return links_; }
  std::vector<Link>& mutable_links() { return links_; }
  // Outgoing link indices per node, sorted by destination id.
  const std::vector<std::vector<int>>& out_links() const { return out_links_; }
  // Index of the directed link src->dst, or -1.
  int find_link(int src, int dst) const;
  // Number of undirected node adjacencies.
  std::size_t edge_count() const;
  bool connected() const;
  // Throws DataError when an invariant is violated.
  void validate() const;

  bool operator==(const Topology& o) const { return node_count_ == o.node_count_ && links_ == o.links_; }

 private:
  void index();

  int node_count_ = 0;
  std::vector<Link> links_;
  std::vector<std::vector<int>> out_links_;
};

enum class TopologyKind { power_law, fat_tree, grid };
std::string_view to_string(TopologyKind k);
TopologyKind parse_topology_kind(std::string_view s);

struct TopologyConfig {
  TopologyKind kind = TopologyKind::power_law;
  // power_law: node count drawn uniformly from [min_nodes, max_nodes].
  int min_nodes = 8;
  int max_nodes = 12;
  double exponent = 2.0;
  // fat_tree arity.
  int k = 4;
  int rows = 2;
  int cols = 2;
  // Link capacities are drawn per undirected edge from this set.
  std::vector<double> capacities_bps{10000.0, 25000.0, 40000.0};
};

// Every link gets one FIFO queue of 32000 bits; build_sample assigns the
// scheduling configuration.
Topology generate_topology(const TopologyConfig& config, std::uint64_t seed);

// Minimal hop-count node sequence from src to dst. Among equal-length paths
// the one that is lexicographically smallest by node id is returned.
std::vector<int> shortest_path_nodes(const Topology& topo, int src, int dst);
// Same path as link indices.
std::vector<int> shortest_path_routing(const Topology& topo, int src, int dst);

enum class TrafficModel { poisson, cbr, on_off, autocorrelated_exp, modulated_exp };
std::string_view to_string(TrafficModel m);
TrafficModel parse_traffic_model(std::string_view s);
inline constexpr std::size_t kTrafficModelCount = 5;

enum class SizeDistribution {
  // 300 + Binomial(1400, 0.5) bits: mean 1000, support [300, 1700].
  binomial,
  // Exponential with the given mean; used by queueing-theory checks.
  exponential,
  fixed,
};
std::string_view to_string(SizeDistribution d);
SizeDistribution parse_size_distribution(std::string_view s);

struct TrafficParams {
  SizeDistribution size_dist = SizeDistribution::binomial;
  // Mean size for exponential and fixed distributions.
  double size_mean_bits = 1000.0;
  // on_off: exponential period means.
  double on_mean_s = 5.0;
  double off_mean_s = 5.0;
  // autocorrelated_exp: lag-one coefficient of the underlying Gaussian AR(1).
  double rho = 0.5;
  // modulated_exp: two-state Markov modulation with rates avg*(1 +- depth).
  double modulation_depth = 0.5;
  double modulation_mean_s = 10.0;

  bool operator==(const TrafficParams&) const = default;
};

struct TrafficDescriptor {
  TrafficModel model = TrafficModel::poisson;
  double avg_rate_bps = 0.0;
  int tos = 0;
  TrafficParams params;

  double mean_packet_bits() const;
  bool operator==(const TrafficDescriptor&) const = default;
};

struct Hop {
  int link = 0;
  int queue = 0;
  bool operator==(const Hop&) const = default;
};

struct Flow {
  int id = 0;
  int src = 0;
  int dst = 0;
  std::vector<Hop> path;
  TrafficDescriptor traffic;

  bool operator==(const Flow&) const = default;
};

struct FlowLabel {
  double delay_s = 0.0;
  // Variance of per-packet delay.
  double jitter_s2 = 0.0;
  double loss = 0.0;
  bool operator==(const FlowLabel&) const = default;
};

struct Provenance {
  std::uint64_t seed = 0;
  double duration_s = 0.0;
  std::string version{kFormatVersion};
  bool operator==(const Provenance&) const = default;
};

struct Sample {
  Topology topology;
  std::vector<Flow> flows;
  // Indexed like flows.
  std::optional<std::vector<FlowLabel>> labels;
  Provenance provenance;

  bool labeled() const { return labels.has_value(); }
  // Throws DataError on a broken path, dangling reference, or bad label.
  void validate() const;
  bool operator==(const Sample&) const = default;
};

// Sum over the path of mean packet size / link capacity.
double transmission_lower_bound(const Sample& sample, const Flow& flow);

struct QueueConfig {
  std::vector<Policy> policies{Policy::fifo};
  std::vector<double> buffer_bits{32000.0};
  // Stand-in weight configurations for WFQ and DRR; one is drawn per node.
  std::vector<std::vector<double>> weight_sets{{0.5, 0.3, 0.2}};
};

struct TrafficConfig {
  std::vector<TrafficModel> models{TrafficModel::poisson};
  // Per-sample maximum average rate, drawn uniformly from this range. Each
  // flow gets max_lambda * U(0.1, 1).
  double max_lambda_min_bps = 400.0;
  double max_lambda_max_bps = 2000.0;
  bool random_tos = true;
  TrafficParams params;
};

// Unlabeled sample with n_flows routed flows. Scheduling policy and buffer
// size are drawn once per node and applied to all of its output ports.
Sample build_sample(const Topology& topo, int n_flows, const TrafficConfig& traffic, const QueueConfig& queues,
                    std::uint64_t seed);

// One JSON object, no trailing newline.
std::string serialize_sample(const Sample& sample);
Sample deserialize_sample(std::string_view text);

// Topology import format: the dataset's "topology" object on its own,
// {"nodes": n, "links": [{"src", "dst", "capacity", "queues": [...]}]}.
std::string serialize_topology(const Topology& t);
Topology deserialize_topology(std::string_view text);
Topology read_topology(const std::string& path);

void write_dataset(const std::string& path, const std::vector<Sample>& samples);
std::vector<Sample> read_dataset(const std::string& path);

}  // namespace gnnperf::net
