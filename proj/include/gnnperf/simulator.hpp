// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "gnnperf/netgraph.hpp"

namespace gnnperf::sim {

// A flow delivered no packets inside the measurement window.
class LabelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimConfig {
  double duration_s = 2000.0;
  // Negative selects 10% of duration.
  double warmup_s = -1.0;
  std::uint64_t seed = 1;
  double reference_packet_bits = 1000.0;
  double propagation_delay_s = 0.0;
  // When set, one CSV line per packet event: time,flow,event,node.
  std::ostream* trace = nullptr;

  double effective_warmup() const { return warmup_s < 0.0 ? 0.1 * duration_s : warmup_s; }
};

// Counters cover packets created at or after the warmup cutoff.
struct FlowStats {
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::uint64_t in_flight = 0;
  double sum_delay = 0.0;
  double sum_delay_sq = 0.0;
  double delivered_bits = 0.0;
  // Smallest per-packet delay minus that packet's transmission lower bound.
  double min_slack = 0.0;

  bool operator==(const FlowStats&) const = default;
};

struct SimResult {
  std::vector<FlowStats> flows;
  // Per queue, flattened in (link, queue) order.
  std::vector<double> max_occupancy_bits;
  std::uint64_t events = 0;

  // mean delay, delay variance, loss fraction. Throws LabelError for a flow
  // without delivered packets.
  std::vector<net::FlowLabel> labels(const net::Sample& sample) const;
};

SimResult simulate(const net::Sample& sample, const SimConfig& config);

// simulate() followed by labels().
std::vector<net::FlowLabel> run_simulation(const net::Sample& sample, const SimConfig& config);

// --- traffic ---------------------------------------------------------------

struct PacketArrival {
  double time_s = 0.0;
  double size_bits = 0.0;
};

// Lazily generated arrival process for one flow.
class TrafficSource {
 public:
  TrafficSource(const net::TrafficDescriptor& descriptor, std::uint64_t seed);
  PacketArrival next();

 private:
  double draw_size();
  double next_gap();

  net::TrafficDescriptor d_;
  std::mt19937_64 rng_;
  double now_ = 0.0;
  // on_off
  bool on_ = true;
  double period_end_ = 0.0;
  // autocorrelated_exp
  double ar_state_ = 0.0;
  // modulated_exp
  bool high_ = true;
  bool started_ = false;
};

std::vector<PacketArrival> generate_traffic(const net::TrafficDescriptor& descriptor, double duration_s,
                                            std::uint64_t seed);

// --- scheduling ------------------------------------------------------------

struct QueuedPacket {
  std::uint32_t id = 0;
  double size_bits = 0.0;
  double start_tag = 0.0;
  double finish_tag = 0.0;
};

// Output port state. Occupancy includes the packet in transmission.
struct PortState {
  explicit PortState(std::size_t queue_count = 1);

  std::vector<std::deque<QueuedPacket>> queues;
  std::vector<double> occupancy_bits;
  bool busy = false;
  // DRR
  std::vector<double> deficit;
  std::size_t drr_current = 0;
  bool drr_turn_open = false;
  // WFQ (self-clocked virtual time)
  double virtual_time = 0.0;
  std::vector<double> last_finish;

  bool empty() const;
  // Appends to queue q and assigns WFQ tags.
  void enqueue(std::size_t q, QueuedPacket p, double weight);
};

// DRR quantum in bits: one 1000-bit reference packet per turn for the
// lightest queue, scaled by weight. Larger packets carry their deficit over.
double drr_quantum(double weight, std::span<const net::Queue> queues);

// Picks the queue to serve next on an idle port, or nullopt when all queues
// are empty. Updates DRR deficits and the WFQ virtual clock for the chosen
// packet; the caller pops the head of the returned queue.
std::optional<std::size_t> scheduler_dequeue(net::Policy policy, PortState& port, std::span<const net::Queue> queues);

// Analytic M/M/1 mean sojourn time 1/(mu - lambda).
double mm1_reference(double lambda, double mu);

}  // namespace gnnperf::sim
