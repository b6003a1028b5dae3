// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>

#include "gnnperf/common.hpp"
#include "gnnperf/simulator.hpp"

namespace gnnperf::sim {

namespace {

// Rank breaks ties at equal time: departures free buffer space before new
// arrivals are admitted, and arrivals in transit land before new packets.
enum class EventKind : std::uint8_t { service_complete = 0, arrival = 1, source_next = 2 };

struct Event {
  double time;
  EventKind kind;
  std::uint64_t seq;
  std::uint32_t ref;  // link for service_complete, packet for arrival, flow for source_next

  bool operator>(const Event& o) const {
    if (time != o.time) return time > o.time;
    if (kind != o.kind) return kind > o.kind;
    return seq > o.seq;
  }
};

struct Packet {
  std::uint32_t flow = 0;
  std::uint32_t hop = 0;
  double size_bits = 0.0;
  double birth = 0.0;
  bool measured = false;
  bool alive = false;
};

class Engine {
 public:
  Engine(const net::Sample& sample, const SimConfig& config)
      : sample_(sample), config_(config), warmup_(config.effective_warmup()) {
    if (!(config.duration_s > 0.0)) throw std::invalid_argument("simulation duration must be positive");
    if (!(warmup_ >= 0.0 && warmup_ < config.duration_s)) {
      throw std::invalid_argument("warmup must be non-negative and shorter than the duration");
    }
    if (!(config.propagation_delay_s >= 0.0)) throw std::invalid_argument("propagation delay must be >= 0");
    sample.validate();
    const auto& links = sample.topology.links();
    ports_.reserve(links.size());
    in_service_.assign(links.size(), 0);
    for (const auto& l : links) {
      queue_base_.push_back(queue_total_);
      queue_total_ += l.queues.size();
      ports_.emplace_back(l.queues.size());
    }
    max_occupancy_.assign(queue_total_, 0.0);
    stats_.assign(sample.flows.size(), FlowStats{});
    for (auto& s : stats_) s.min_slack = std::numeric_limits<double>::infinity();
    inv_cap_sum_.assign(sample.flows.size(), 0.0);
    for (std::size_t f = 0; f < sample.flows.size(); ++f) {
      for (const auto& h : sample.flows[f].path) {
        inv_cap_sum_[f] += 1.0 / links[static_cast<std::size_t>(h.link)].capacity_bps;
      }
      sources_.emplace_back(sample.flows[f].traffic, derive_seed(config.seed, f));
      pending_.push_back(sources_.back().next());
      if (pending_.back().time_s < config.duration_s) push(pending_.back().time_s, EventKind::source_next, f);
    }
  }

  SimResult run() {
    SimResult result;
    while (!events_.empty()) {
      const Event e = events_.top();
      if (e.time > config_.duration_s) break;
      events_.pop();
      ++result.events;
      now_ = e.time;
      switch (e.kind) {
        case EventKind::source_next: on_source(e.ref); break;
        case EventKind::arrival: arrive(e.ref); break;
        case EventKind::service_complete: on_service_complete(e.ref); break;
      }
    }
    for (const auto& p : packets_) {
      if (p.alive && p.measured) ++stats_[p.flow].in_flight;
    }
    for (auto& s : stats_) {
      if (s.delivered == 0) s.min_slack = 0.0;
    }
    result.flows = std::move(stats_);
    result.max_occupancy_bits = std::move(max_occupancy_);
    return result;
  }

 private:
  void push(double t, EventKind kind, std::size_t ref) {
    events_.push(Event{t, kind, seq_++, static_cast<std::uint32_t>(ref)});
  }

  std::uint32_t allocate(const Packet& p) {
    if (!free_.empty()) {
      const auto id = free_.back();
      free_.pop_back();
      packets_[id] = p;
      return id;
    }
    packets_.push_back(p);
    return static_cast<std::uint32_t>(packets_.size() - 1);
  }

  void release(std::uint32_t id) {
    packets_[id].alive = false;
    free_.push_back(id);
  }

  void trace(std::uint32_t flow, const char* what, int node) {
    if (config_.trace) *config_.trace << now_ << ',' << flow << ',' << what << ',' << node << '\n';
  }

  void on_source(std::uint32_t flow) {
    const PacketArrival a = pending_[flow];
    Packet p;
    p.flow = flow;
    p.size_bits = a.size_bits;
    p.birth = now_;
    p.measured = now_ >= warmup_;
    p.alive = true;
    if (p.measured) ++stats_[flow].sent;
    const auto id = allocate(p);
    trace(flow, "send", sample_.flows[flow].src);
    pending_[flow] = sources_[flow].next();
    if (pending_[flow].time_s < config_.duration_s) push(pending_[flow].time_s, EventKind::source_next, flow);
    arrive(id);
  }

  void arrive(std::uint32_t id) {
    Packet& p = packets_[id];
    const auto& hop = sample_.flows[p.flow].path[p.hop];
    const auto link = static_cast<std::size_t>(hop.link);
    const auto q = static_cast<std::size_t>(hop.queue);
    const auto& queue_cfg = sample_.topology.links()[link].queues[q];
    PortState& port = ports_[link];
    const int node = sample_.topology.links()[link].src;
    if (port.occupancy_bits[q] + p.size_bits > queue_cfg.buffer_bits) {
      if (p.measured) ++stats_[p.flow].dropped;
      trace(p.flow, "drop", node);
      release(id);
      return;
    }
    trace(p.flow, "enqueue", node);
    port.occupancy_bits[q] += p.size_bits;
    auto& peak = max_occupancy_[queue_base_[link] + q];
    peak = std::max(peak, port.occupancy_bits[q]);
    port.enqueue(q, QueuedPacket{id, p.size_bits, 0.0, 0.0}, queue_cfg.weight);
    if (!port.busy) start_service(link);
  }

  void start_service(std::size_t link) {
    PortState& port = ports_[link];
    const auto& l = sample_.topology.links()[link];
    const auto q = scheduler_dequeue(l.queues.front().policy, port, l.queues);
    if (!q) return;
    const QueuedPacket head = port.queues[*q].front();
    port.queues[*q].pop_front();
    port.busy = true;
    in_service_[link] = head.id;
    push(now_ + head.size_bits / l.capacity_bps, EventKind::service_complete, link);
  }

  void on_service_complete(std::uint32_t link) {
    PortState& port = ports_[link];
    const auto id = in_service_[link];
    Packet& p = packets_[id];
    const auto& flow = sample_.flows[p.flow];
    port.occupancy_bits[static_cast<std::size_t>(flow.path[p.hop].queue)] -= p.size_bits;
    port.busy = false;
    trace(p.flow, "depart", sample_.topology.links()[link].src);
    p.hop += 1;
    if (p.hop == flow.path.size()) {
      const double delay = now_ - p.birth;
      if (p.measured) {
        auto& s = stats_[p.flow];
        ++s.delivered;
        s.sum_delay += delay;
        s.sum_delay_sq += delay * delay;
        s.delivered_bits += p.size_bits;
        s.min_slack = std::min(s.min_slack, delay - p.size_bits * inv_cap_sum_[p.flow]);
      }
      trace(p.flow, "deliver", flow.dst);
      release(id);
    } else {
      push(now_ + config_.propagation_delay_s, EventKind::arrival, id);
    }
    start_service(link);
  }

  const net::Sample& sample_;
  const SimConfig& config_;
  const double warmup_;
  double now_ = 0.0;
  std::uint64_t seq_ = 0;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::vector<Packet> packets_;
  std::vector<std::uint32_t> free_;
  std::vector<PortState> ports_;
  std::vector<std::uint32_t> in_service_;
  std::vector<std::size_t> queue_base_;
  std::size_t queue_total_ = 0;
  std::vector<double> max_occupancy_;
  std::vector<FlowStats> stats_;
  std::vector<double> inv_cap_sum_;
  std::vector<TrafficSource> sources_;
  std::vector<PacketArrival> pending_;
};

}  // namespace

std::vector<net::FlowLabel> SimResult::labels(const net::Sample& sample) const {
  std::vector<net::FlowLabel> out;
  out.reserve(flows.size());
  for (std::size_t f = 0; f < flows.size(); ++f) {
    const auto& s = flows[f];
    if (s.delivered == 0) {
      throw LabelError("flow " + std::to_string(sample.flows[f].id) +
                       " delivered no packets after warmup; increase the simulation duration");
    }
    const double n = static_cast<double>(s.delivered);
    const double mean = s.sum_delay / n;
    const double var = std::max(0.0, s.sum_delay_sq / n - mean * mean);
    const double loss = s.sent == 0 ? 0.0 : static_cast<double>(s.dropped) / static_cast<double>(s.sent);
    out.push_back(net::FlowLabel{mean, var, loss});
  }
  return out;
}

SimResult simulate(const net::Sample& sample, const SimConfig& config) { return Engine(sample, config).run(); }

std::vector<net::FlowLabel> run_simulation(const net::Sample& sample, const SimConfig& config) {
  return simulate(sample, config).labels(sample);
}

}  // namespace gnnperf::sim
