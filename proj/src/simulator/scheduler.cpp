// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <limits>

#include "gnnperf/simulator.hpp"

namespace gnnperf::sim {

namespace {
constexpr double kReferencePacketBits = 1000.0;
}

PortState::PortState(std::size_t queue_count)
    : queues(queue_count), occupancy_bits(queue_count, 0.0), deficit(queue_count, 0.0), last_finish(queue_count, 0.0) {}

bool PortState::empty() const {
  return std::all_of(queues.begin(), queues.end(), [](const auto& q) { return q.empty(); });
}

void PortState::enqueue(std::size_t q, QueuedPacket p, double weight) {
  p.start_tag = std::max(virtual_time, last_finish[q]);
  p.finish_tag = p.start_tag + p.size_bits / weight;
  last_finish[q] = p.finish_tag;
  queues[q].push_back(p);
}

double drr_quantum(double weight, std::span<const net::Queue> queues) {
  double min_w = std::numeric_limits<double>::infinity();
  for (const auto& q : queues) min_w = std::min(min_w, q.weight);
  return kReferencePacketBits * weight / min_w;
}

std::optional<std::size_t> scheduler_dequeue(net::Policy policy, PortState& port, std::span<const net::Queue> queues) {
  const std::size_t n = port.queues.size();
  if (port.empty()) {
    port.virtual_time = 0.0;
    std::fill(port.last_finish.begin(), port.last_finish.end(), 0.0);
    std::fill(port.deficit.begin(), port.deficit.end(), 0.0);
    port.drr_turn_open = false;
    return std::nullopt;
  }
  switch (policy) {
    case net::Policy::fifo:
    case net::Policy::sp:
      for (std::size_t q = 0; q < n; ++q)
        if (!port.queues[q].empty()) return q;
      break;

    case net::Policy::wfq: {
      std::size_t best = n;
      for (std::size_t q = 0; q < n; ++q) {
        if (port.queues[q].empty()) continue;
        if (best == n || port.queues[q].front().finish_tag < port.queues[best].front().finish_tag) best = q;
      }
      port.virtual_time = port.queues[best].front().start_tag;
      return best;
    }

    case net::Policy::drr:
      for (;;) {
        const std::size_t q = port.drr_current;
        auto& queue = port.queues[q];
        if (queue.empty()) {
          port.deficit[q] = 0.0;
          port.drr_turn_open = false;
          port.drr_current = (q + 1) % n;
          continue;
        }
        if (!port.drr_turn_open) {
          port.deficit[q] += drr_quantum(queues[q].weight, queues);
          port.drr_turn_open = true;
        }
        if (queue.front().size_bits <= port.deficit[q]) {
          port.deficit[q] -= queue.front().size_bits;
          return q;
        }
        port.drr_turn_open = false;
        port.drr_current = (q + 1) % n;
      }
  }
  return std::nullopt;
}

double mm1_reference(double lambda, double mu) {
  if (!(lambda >= 0.0) || !(mu > 0.0)) throw std::invalid_argument("mm1_reference: rates must be non-negative");
  if (!(lambda < mu)) throw std::invalid_argument("mm1_reference: unstable queue (lambda >= mu)");
  return 1.0 / (mu - lambda);
}

}  // namespace gnnperf::sim
